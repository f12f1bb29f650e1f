#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlab/flow.hpp"
#include "hlab/grid.hpp"
#include "hlab/harnack.hpp"
#include "hlab/heat.hpp"
#include "hlab/profiles.hpp"

namespace hlab {

inline constexpr int kScenarioSchemaVersion = 1;

struct BackgroundSpec {
  BackgroundKind kind = BackgroundKind::FlatTorus;
  int n = 2;
  std::size_t N = 64;
};

struct FlowSpec {
  FlowKind kind = FlowKind::StaticFlat;
  /// One run per entry; a single value for most scenarios.
  std::vector<double> epsilons{1.0};
  std::optional<double> t_end;
  std::optional<Profile> initial_phi;
  double sigma = kDefaultSigma;
  std::optional<double> max_dt;
};

struct HeatSpec {
  std::string id;
  Direction direction = Direction::ForwardInT;
  /// Potential coefficient; when follows_epsilon is set, q is the flow's eps.
  double q = 0.0;
  bool follows_epsilon = false;
  double a = 1.0;
  Profile data;
};

struct MonitorSpec {
  QuantityKind quantity = QuantityKind::H2R;
  std::string heat;
  /// Type-I constant; empty means "search for the smallest working d".
  std::optional<double> d;
  std::optional<double> t_min;
  std::optional<double> t_max;
  double bound_shift = 0.0;
};

struct IdentitySpec {
  IdentityId id = IdentityId::Grad_forward_evolution;
  std::string heat;
  /// Requested times; snapped to the nearest admissible schedule point.
  std::vector<double> times;
};

/// Path endpoint: a coordinate, or a node index (negative counts from the end).
struct PathPoint {
  std::optional<double> x;
  std::optional<long> node;
  double resolve(const Grid& grid) const;
};

struct PathSpec {
  PathTheorem theorem = PathTheorem::Potential2R;
  std::string heat;
  PathPoint x1;
  double t1 = 0.0;
  PathPoint x2;
  double t2 = 0.0;
};

struct ToleranceSpec {
  Tolerance harnack;
  double trace = 1e-4;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  std::vector<std::string> theorems;
  BackgroundSpec background;
  FlowSpec flow;
  std::vector<HeatSpec> heat;
  std::vector<MonitorSpec> monitors;
  std::vector<IdentitySpec> identities;
  std::vector<PathSpec> path_checks;
  std::vector<std::string> positivity;
  bool trace_harnack = false;
  ToleranceSpec tolerance;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> max_steps;
  /// The parsed document, echoed into reports.
  nlohmann::ordered_json source;

  const HeatSpec& heat_by_id(const std::string& id) const;
};

/// Parses and validates; ErrorKind::Config on any problem.
ScenarioConfig parse_scenario(const nlohmann::ordered_json& doc);

/// Loads a file path, or a bundled scenario by name when no such file exists.
ScenarioConfig load_scenario(const std::string& path_or_name);

/**
 * Checks every monitor's hypotheses against the configured background and
 * initial data; throws ErrorKind::Config citing the violated hypothesis.
 */
void validate(const ScenarioConfig& config);

/// Grid and flow configuration for one eps variant.
GridPtr make_grid(const ScenarioConfig& config);
FlowConfig make_flow_config(const ScenarioConfig& config, const GridPtr& grid, double epsilon);
HeatProblem make_heat_problem(const HeatSpec& spec, const GridPtr& grid, double epsilon,
                              double sigma);

}  // namespace hlab
