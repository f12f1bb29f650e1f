#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "hlab/metric.hpp"

namespace hlab {

enum class FlowKind {
  EpsilonSurface,   // d/dt g = -eps R g on the conformal sphere
  ShrinkingSphere,  // exact Ricci flow c(t) = 1 - 2(n-1)t on round S^n
  StaticFlat,       // flat torus, a static Ricci flow
};

std::string_view to_string(FlowKind kind);
FlowKind flow_kind_from_string(std::string_view name);

/// Default parabolic stability constant: dt <= sigma h^2 min(metric factor).
inline constexpr double kDefaultSigma = 0.2;

struct FlowConfig {
  FlowKind kind = FlowKind::StaticFlat;
  GridPtr grid;
  double epsilon = 1.0;
  /// End of the run. Surface runs default to 0.9 of the estimated singular time.
  std::optional<double> t_end;
  /// Initial conformal factor (EpsilonSurface only); zero when absent.
  std::optional<ScalarField> initial_phi;
  double sigma = kDefaultSigma;
  /// Upper cap on the step, on top of the stability limit.
  std::optional<double> max_dt;
  std::optional<std::size_t> max_steps;
};

/// Type-I curvature bound |Rm| <= d0 / (T - t).
struct TypeIBound {
  double d0;
  double blowup_time;
};

/**
 * Time-indexed metric states on a uniform schedule t_0 = 0 < ... < t_K.
 *
 * Each step also stores the state at its midpoint so that heat solvers can
 * take Runge-Kutta stages without interpolating the metric in time.
 */
class FlowTrajectory {
 public:
  FlowTrajectory(FlowKind kind, double epsilon, std::optional<double> singular_time,
                 std::vector<double> schedule, std::vector<MetricState> states,
                 std::vector<MetricState> midpoints);

  FlowKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  int dimension() const { return states_.front().dimension(); }
  const Grid& grid() const { return states_.front().grid(); }
  const GridPtr& grid_ptr() const { return states_.front().grid_ptr(); }
  std::optional<double> singular_time() const { return singular_time_; }

  /// Number of schedule points, K + 1.
  std::size_t size() const { return schedule_.size(); }
  std::size_t steps() const { return schedule_.size() - 1; }
  const std::vector<double>& schedule() const { return schedule_; }
  double time(std::size_t k) const { return schedule_[k]; }
  double end_time() const { return schedule_.back(); }
  double step_size() const { return step_; }

  const MetricState& state(std::size_t k) const { return states_[k]; }
  /// State at t_k + dt/2, for k < K.
  const MetricState& midpoint(std::size_t k) const { return midpoints_[k]; }
  /// Half-step lattice: even j -> state(j/2), odd j -> midpoint(j/2).
  const MetricState& half_state(std::size_t j) const;

  /// Schedule index whose time matches t to within a tenth of a step.
  std::size_t index_of(double t) const;

  /// True for flows that are Ricci flows (d/dt g = -2 Ric).
  bool is_ricci_flow() const;

 private:
  FlowKind kind_;
  double epsilon_;
  std::optional<double> singular_time_;
  std::vector<double> schedule_;
  std::vector<MetricState> states_;
  std::vector<MetricState> midpoints_;
  double step_;
};

/// Largest step the solvers accept for this state: sigma h^2 min(metric factor).
double stability_limit(const MetricState& state, double sigma);

/// One classical RK4 step of d phi/dt = -(eps/2) R for the conformal factor.
MetricState step_surface_flow(const MetricState& state, double dt, double epsilon,
                              double sigma = kDefaultSigma);

/// Round S^n under Ricci flow: c(t) = 1 - 2(n-1)t.
MetricState shrinking_sphere_state(GridPtr grid, double t);
double shrinking_sphere_blowup_time(int n);

/// Area / (8 pi eps) for a surface of total curvature 8 pi; empty when eps = 0.
std::optional<double> estimated_surface_singular_time(const MetricState& state, double epsilon);

FlowTrajectory build_trajectory(const FlowConfig& config);

TypeIBound type_one_constant(const FlowTrajectory& traj);

}  // namespace hlab
