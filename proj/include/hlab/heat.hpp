#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "hlab/flow.hpp"

namespace hlab {

/// Which clock the heat equation runs forward in. Backward equations in t
/// are solved forward in tau = T - t with the metric replayed in reverse.
enum class Direction { ForwardInT, ForwardInTau };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view name);

/**
 * A heat-type equation for f written in u = -ln f:
 *
 *   du/dclock = Delta u - |grad u|^2 + s q R - a u,
 *
 * with s = -1 forward in t and s = +1 forward in tau. Initial data is given
 * at t = 0 (ForwardInT) or terminal data at t = T (ForwardInTau).
 */
struct HeatProblem {
  Direction direction = Direction::ForwardInT;
  double potential_coefficient = 0.0;  // q
  double decay_coefficient = 1.0;      // a
  ScalarField initial_data;            // f at clock 0, strictly positive
  double sigma = kDefaultSigma;
};

ScalarField u_rhs(const MetricState& m, const ScalarField& u, double q, double a,
                  Direction direction);

/// u on every flow schedule point, indexed by the flow index k (time t_k)
/// regardless of the integration direction.
class HeatTrajectory {
 public:
  HeatTrajectory(Direction direction, double q, double a, double end_time,
                 std::vector<double> schedule, std::vector<ScalarField> u);

  Direction direction() const { return direction_; }
  double potential_coefficient() const { return q_; }
  double decay_coefficient() const { return a_; }

  std::size_t size() const { return u_.size(); }
  const std::vector<double>& schedule() const { return schedule_; }
  double time(std::size_t k) const { return schedule_[k]; }
  /// tau = T - t_k.
  double tau(std::size_t k) const { return end_time_ - schedule_[k]; }
  double end_time() const { return end_time_; }

  const ScalarField& u(std::size_t k) const { return u_[k]; }
  ScalarField f(std::size_t k) const;

  /// Flow index of the n-th point in integration order.
  std::size_t index_in_clock_order(std::size_t step) const;

 private:
  Direction direction_;
  double q_;
  double a_;
  double end_time_;
  std::vector<double> schedule_;
  std::vector<ScalarField> u_;
};

/// Classical RK4 on the flow's own schedule; Runge-Kutta stages at half steps
/// read the flow's stored midpoint states.
HeatTrajectory solve(const FlowTrajectory& flow, const HeatProblem& problem);

/// Bounds on f = e^{-u} along a run without potential (0 < f < 1 preserved).
struct PositivityReport {
  double inf_initial;
  double sup_initial;
  double min_f;
  double max_f;
  /// Per-time extrema in integration order.
  std::vector<double> clock;
  std::vector<double> min_per_time;
  std::vector<double> max_per_time;
  double tolerance;
  bool lower_bound_holds;  // min f >= inf f0 (1 - tol)
  bool upper_bound_holds;  // max f < 1 + tol
  bool min_monotone;       // per-time min f non-decreasing within tol
  bool holds() const { return lower_bound_holds && upper_bound_holds && min_monotone; }
};

PositivityReport positivity_report(const HeatTrajectory& ht, double h2_coefficient = 1.0);

}  // namespace hlab
