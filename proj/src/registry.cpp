#include "hlab/registry.hpp"

#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace hlab {

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> table = {
      {"torus-constant", "1.5, 1.7, 1.8, 3.4, 3.7, 5.1, 5.2",
       "spatially constant data on the flat torus; every bound against its closed form"},
      {"sphere-eps-family", "1.1, 2.1", "eps-flow on a perturbed sphere, eps in {0, 1/4, 1/2, 1}"},
      {"thm1.5-shrinking-sphere", "1.5", "backward heat with potential 2R on the shrinking S^2"},
      {"thm1.5-torus-n2", "1.5", "backward heat with potential 2R on the flat 2-torus"},
      {"thm1.5-torus-n3", "1.5", "backward heat with potential 2R on the flat 3-torus"},
      {"thm1.6-shrinking-sphere-typeI", "1.6", "type-I variant with the smallest working d"},
      {"thm1.7-torus", "1.7", "backward heat with potential R on the flat torus"},
      {"thm1.7-shrinking-sphere", "1.7", "backward heat with potential R on the shrinking S^2"},
      {"thm1.8-torus-halfwindow", "1.8", "shifted quantity on the window [T/2, T)"},
      {"thm3.4-torus-path", "3.4", "integrated Harnack along straight paths, potential 2R"},
      {"thm3.7-sphere-path", "3.7", "integrated Harnack along meridians, potential R"},
      {"thm5.1-torus-forward", "5.1", "gradient estimate for the forward equation, 0 < f < 1"},
      {"thm5.1-shrinking-sphere", "5.1", "forward gradient estimate along the shrinking S^2"},
      {"thm5.2-flat-K0", "5.2", "gradient estimate for the backward equation with K = 0"},
      {"torus-identities", "1.5, 1.7, 1.8, 5.1, 5.2",
       "evolution identities on the flat torus for convergence studies"},
      {"sphere-heps-identity", "1.1", "evolution identity for H_eps on the conformal sphere"},
  };
  return table;
}

std::filesystem::path scenario_directory() {
  if (const char* env = std::getenv("HLAB_SCENARIO_DIR")) return env;
  return HLAB_SCENARIO_DIR;
}

std::optional<std::filesystem::path> bundled_scenario_path(std::string_view name) {
  for (const auto& s : bundled_scenarios()) {
    if (s.name == name) return scenario_directory() / (std::string(name) + ".json");
  }
  return std::nullopt;
}

std::string list_scenarios() {
  std::ostringstream out;
  for (const auto& s : bundled_scenarios()) {
    out << std::left << std::setw(32) << s.name << " Thm " << std::setw(28) << s.theorems << ' '
        << s.summary << '\n';
  }
  return out.str();
}

}  // namespace hlab
