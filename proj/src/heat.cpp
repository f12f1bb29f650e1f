#include "hlab/heat.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"

namespace hlab {

std::string_view to_string(Direction d) {
  return d == Direction::ForwardInT ? "ForwardInT" : "ForwardInTau";
}

Direction direction_from_string(std::string_view name) {
  if (name == "ForwardInT") return Direction::ForwardInT;
  if (name == "ForwardInTau") return Direction::ForwardInTau;
  fail(ErrorKind::Config, "unknown heat direction '" + std::string(name) + "'");
}

ScalarField u_rhs(const MetricState& m, const ScalarField& u, double q, double a,
                  Direction direction) {
  const double s = direction == Direction::ForwardInT ? -1.0 : 1.0;
  ScalarField out = laplacian(m, u) - grad_norm_sq(m, u);
  out += (s * q) * m.scalar_curvature();
  out -= a * u;
  return out;
}

HeatTrajectory::HeatTrajectory(Direction direction, double q, double a, double end_time,
                               std::vector<double> schedule, std::vector<ScalarField> u)
    : direction_(direction),
      q_(q),
      a_(a),
      end_time_(end_time),
      schedule_(std::move(schedule)),
      u_(std::move(u)) {
  if (u_.size() != schedule_.size()) fail(ErrorKind::Dimension, "heat trajectory size mismatch");
}

ScalarField HeatTrajectory::f(std::size_t k) const {
  return u_[k].map([](double v) { return std::exp(-v); });
}

std::size_t HeatTrajectory::index_in_clock_order(std::size_t step) const {
  return direction_ == Direction::ForwardInT ? step : u_.size() - 1 - step;
}

HeatTrajectory solve(const FlowTrajectory& flow, const HeatProblem& problem) {
  const ScalarField& f0 = problem.initial_data;
  require_same_grid(flow.grid(), f0.grid(), "heat initial data");
  for (std::size_t j = 0; j < f0.size(); ++j) {
    if (!(f0[j] > 0.0)) {
      std::ostringstream msg;
      msg << "heat data must be strictly positive; f=" << f0[j] << " at x=" << f0.grid().node(j);
      fail(ErrorKind::Domain, msg.str());
    }
  }

  const std::size_t steps = flow.steps();
  const double q = problem.potential_coefficient;
  const double a = problem.decay_coefficient;
  const Direction dir = problem.direction;
  const bool forward = dir == Direction::ForwardInT;

  std::vector<ScalarField> u(flow.size(), ScalarField::constant(flow.grid_ptr(), 0.0));
  const std::size_t first = forward ? 0 : steps;
  u[first] = f0.map([](double v) { return -std::log(v); });

  for (std::size_t i = 0; i < steps; ++i) {
    // Clock step i runs from flow index `from` to `to`; the midpoint state is
    // shared by both directions.
    const std::size_t from = forward ? i : steps - i;
    const std::size_t to = forward ? i + 1 : steps - i - 1;
    const MetricState& m0 = flow.state(from);
    const MetricState& mh = flow.midpoint(std::min(from, to));
    const MetricState& m1 = flow.state(to);
    // Uniform schedule; using the nominal step keeps both directions bitwise
    // identical on static metrics.
    const double dt = flow.step_size();

    const double limit = std::min(stability_limit(m0, problem.sigma),
                                  stability_limit(m1, problem.sigma));
    if (dt > limit) {
      std::ostringstream msg;
      msg << "heat step " << dt << " exceeds the parabolic limit " << limit
          << " at t=" << flow.time(from);
      fail(ErrorKind::Stability, msg.str());
    }

    const ScalarField& y = u[from];
    const ScalarField k1 = u_rhs(m0, y, q, a, dir);
    const ScalarField k2 = u_rhs(mh, y + (0.5 * dt) * k1, q, a, dir);
    const ScalarField k3 = u_rhs(mh, y + (0.5 * dt) * k2, q, a, dir);
    const ScalarField k4 = u_rhs(m1, y + dt * k3, q, a, dir);
    u[to] = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!u[to].all_finite()) {
      std::ostringstream msg;
      msg << "heat solution blew up (non-finite u) at t=" << flow.time(to);
      fail(ErrorKind::Stability, msg.str());
    }
  }
  return HeatTrajectory(dir, q, a, flow.end_time(), flow.schedule(), std::move(u));
}

PositivityReport positivity_report(const HeatTrajectory& ht, double h2_coefficient) {
  const double h = ht.u(0).grid().spacing();
  PositivityReport rep{};
  rep.tolerance = 1e-8 + h2_coefficient * h * h;

  const ScalarField f0 = ht.f(ht.index_in_clock_order(0));
  rep.inf_initial = f0.min();
  rep.sup_initial = f0.max();
  rep.min_f = rep.inf_initial;
  rep.max_f = rep.sup_initial;
  rep.min_monotone = true;

  for (std::size_t i = 0; i < ht.size(); ++i) {
    const std::size_t k = ht.index_in_clock_order(i);
    const ScalarField f = ht.f(k);
    const double lo = f.min();
    const double hi = f.max();
    if (!rep.min_per_time.empty() && lo < rep.min_per_time.back() - rep.tolerance)
      rep.min_monotone = false;
    rep.clock.push_back(ht.direction() == Direction::ForwardInT ? ht.time(k) : ht.tau(k));
    rep.min_per_time.push_back(lo);
    rep.max_per_time.push_back(hi);
    rep.min_f = std::min(rep.min_f, lo);
    rep.max_f = std::max(rep.max_f, hi);
  }
  rep.lower_bound_holds = rep.min_f >= rep.inf_initial * (1.0 - rep.tolerance);
  rep.upper_bound_holds = rep.max_f < 1.0 + rep.tolerance;
  return rep;
}

}  // namespace hlab
