#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hlab {

struct BundledScenario {
  std::string_view name;
  std::string_view theorems;  // comma separated, e.g. "1.5, 1.7"
  std::string_view summary;
};

const std::vector<BundledScenario>& bundled_scenarios();

/// Directory holding the bundled configs; HLAB_SCENARIO_DIR in the environment overrides it.
std::filesystem::path scenario_directory();

std::optional<std::filesystem::path> bundled_scenario_path(std::string_view name);

/// One line per bundled scenario: name, theorems, summary.
std::string list_scenarios();

}  // namespace hlab
