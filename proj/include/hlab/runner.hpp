#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlab/scenario.hpp"

namespace hlab {

inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  /// Replaces the absolute part of the Harnack tolerance.
  std::optional<double> tolerance;
  std::optional<std::size_t> max_steps;
  /// Replaces background.N.
  std::optional<std::size_t> resolution;
  bool quiet = true;
  bool write_files = true;
};

/// Flow and heat solutions of one eps variant.
struct Simulation {
  double epsilon;
  FlowTrajectory flow;
  std::map<std::string, HeatTrajectory> heat;
};

Simulation simulate(const ScenarioConfig& config, double epsilon, const RunOptions& options = {});

struct MonitorResult {
  std::string heat;
  HarnackReport report;
};

struct IdentityResult {
  std::string heat;
  IdentityResidual residual;
};

struct PathResult {
  std::string heat;
  PathTheorem theorem;
  PathHarnackCheck check;
  double tolerance;
  bool holds() const { return check.slack >= -tolerance; }
};

struct PositivityResult {
  std::string heat;
  PositivityReport report;
};

struct VariantResult {
  std::string label;
  double epsilon;
  FlowKind flow_kind;
  std::size_t steps;
  double step_size;
  double end_time;
  std::optional<double> singular_time;
  std::optional<TypeIBound> type_one;
  std::vector<MonitorResult> monitors;
  std::vector<IdentityResult> identities;
  std::vector<PathResult> path_checks;
  std::vector<PositivityResult> positivity;
  std::optional<HarnackReport> trace;

  bool holds() const;
};

struct RunReport {
  ScenarioConfig config;
  std::size_t resolution;
  double spacing;
  std::vector<VariantResult> variants;
  double wall_seconds = 0.0;  // not serialized, keeps report files reproducible

  bool holds() const;
  /// Labels of every failed check, in report order.
  std::vector<std::string> failures() const;
};

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// 0 when every verdict holds, 2 otherwise.
int exit_code(const RunReport& report);

nlohmann::ordered_json to_json(const RunReport& report);
std::string summary_text(const RunReport& report);

/// report.json, report.txt and one series_<label>.csv per monitor.
void write_report(const RunReport& report, const std::filesystem::path& dir);

std::filesystem::path default_output_dir(const ScenarioConfig& config);

// --- refinement studies --------------------------------------------------------

struct StudyRow {
  std::string label;
  std::vector<double> values;  // one per level (solution errors: one per level pair)
  std::optional<double> order;  // empty when exact
  bool exact = false;
};

struct StudyReport {
  std::string scenario;
  std::vector<std::size_t> resolutions;
  std::vector<StudyRow> rows;
  double min_order = 1.5;
  bool passes() const;
};

/// Values at or below this are treated as rounding noise.
inline constexpr double kExactThreshold = 1e-9;

/// Least-squares slope of -log2(values) against the level index.
double fitted_order(const std::vector<double>& values);

/**
 * Runs the scenario at N, 2N, ..., 2^(levels-1) N with dt tied to h^2,
 * recording identity residual norms and the change in the solutions between
 * consecutive levels (restricted to the coarser grid).
 */
StudyReport convergence_study(const ScenarioConfig& config, int levels,
                              const RunOptions& options = {});

int exit_code(const StudyReport& report);
nlohmann::ordered_json to_json(const StudyReport& report);
std::string summary_text(const StudyReport& report);
void write_study(const StudyReport& report, const std::filesystem::path& dir);

/// Coarse-grid restriction of a field on the grid refined once.
ScalarField restrict_to(const ScalarField& fine, const GridPtr& coarse);

}  // namespace hlab
