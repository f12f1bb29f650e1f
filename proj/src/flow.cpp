#include "hlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"

namespace hlab {

std::string_view to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::EpsilonSurface: return "EpsilonSurface";
    case FlowKind::ShrinkingSphere: return "ShrinkingSphere";
    case FlowKind::StaticFlat: return "StaticFlat";
  }
  return "unknown";
}

FlowKind flow_kind_from_string(std::string_view name) {
  if (name == "EpsilonSurface") return FlowKind::EpsilonSurface;
  if (name == "ShrinkingSphere") return FlowKind::ShrinkingSphere;
  if (name == "StaticFlat") return FlowKind::StaticFlat;
  fail(ErrorKind::Config, "unknown flow kind '" + std::string(name) + "'");
}

FlowTrajectory::FlowTrajectory(FlowKind kind, double epsilon, std::optional<double> singular_time,
                               std::vector<double> schedule, std::vector<MetricState> states,
                               std::vector<MetricState> midpoints)
    : kind_(kind),
      epsilon_(epsilon),
      singular_time_(singular_time),
      schedule_(std::move(schedule)),
      states_(std::move(states)),
      midpoints_(std::move(midpoints)) {
  if (schedule_.size() < 2 || states_.size() != schedule_.size() ||
      midpoints_.size() + 1 != schedule_.size())
    fail(ErrorKind::Dimension, "inconsistent trajectory storage");
  step_ = schedule_[1] - schedule_[0];
}

const MetricState& FlowTrajectory::half_state(std::size_t j) const {
  return (j % 2 == 0) ? states_[j / 2] : midpoints_[j / 2];
}

std::size_t FlowTrajectory::index_of(double t) const {
  const double s = (t - schedule_.front()) / step_;
  const double r = std::round(s);
  if (r < 0.0 || r > static_cast<double>(steps()) || std::abs(s - r) > 0.1) {
    std::ostringstream msg;
    msg << "time " << t << " is not on the flow schedule (dt=" << step_ << ")";
    fail(ErrorKind::Domain, msg.str());
  }
  return static_cast<std::size_t>(r);
}

bool FlowTrajectory::is_ricci_flow() const {
  return kind_ != FlowKind::EpsilonSurface || epsilon_ == 1.0;
}

double stability_limit(const MetricState& state, double sigma) {
  const double h = state.grid().spacing();
  return sigma * h * h * state.min_metric_factor();
}

namespace {

void check_surface_state(const MetricState& s, bool positive_curvature) {
  const ScalarField& r = s.scalar_curvature();
  if (!s.phi().all_finite() || !r.all_finite()) {
    std::ostringstream msg;
    msg << "surface flow produced non-finite values at t=" << s.time();
    fail(ErrorKind::Stability, msg.str());
  }
  if (positive_curvature && r.min() <= 0.0) {
    std::ostringstream msg;
    msg << "surface flow lost positive curvature at t=" << s.time() << " (min R=" << r.min()
        << ")";
    fail(ErrorKind::Stability, msg.str());
  }
}

}  // namespace

MetricState step_surface_flow(const MetricState& state, double dt, double epsilon, double sigma) {
  if (!state.is_conformal()) fail(ErrorKind::Unsupported, "surface flow needs a conformal metric");
  if (epsilon < 0.0) fail(ErrorKind::Domain, "epsilon must be >= 0");
  const double limit = stability_limit(state, sigma);
  if (dt > limit) {
    std::ostringstream msg;
    msg << "step " << dt << " exceeds the parabolic limit " << limit << " at t=" << state.time();
    fail(ErrorKind::Stability, msg.str());
  }
  const double t = state.time();
  const ScalarField& phi = state.phi();
  const double half = -0.5 * epsilon;

  // d phi / dt = -(eps/2) R(phi)
  auto velocity = [&](const ScalarField& p) {
    return half * MetricState::conformal(t, p).scalar_curvature();
  };
  const ScalarField k1 = half * state.scalar_curvature();
  const ScalarField k2 = velocity(phi + 0.5 * dt * k1);
  const ScalarField k3 = velocity(phi + 0.5 * dt * k2);
  const ScalarField k4 = velocity(phi + dt * k3);
  ScalarField next = phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  MetricState out = MetricState::conformal(t + dt, std::move(next));
  check_surface_state(out, state.scalar_curvature().min() > 0.0);
  return out;
}

double shrinking_sphere_blowup_time(int n) {
  if (n < 2) fail(ErrorKind::Domain, "shrinking sphere needs n >= 2");
  return 1.0 / (2.0 * (n - 1.0));
}

MetricState shrinking_sphere_state(GridPtr grid, double t) {
  const int n = grid->dimension();
  const double blowup = shrinking_sphere_blowup_time(n);
  if (t >= blowup) {
    std::ostringstream msg;
    msg << "shrinking S^" << n << " is singular at T=" << blowup << ", requested t=" << t;
    fail(ErrorKind::Singularity, msg.str());
  }
  return MetricState::scaled(t, std::move(grid), 1.0 - 2.0 * (n - 1.0) * t);
}

std::optional<double> estimated_surface_singular_time(const MetricState& state, double epsilon) {
  if (epsilon <= 0.0) return std::nullopt;
  const double area = integrate(state, ScalarField::constant(state.grid_ptr(), 1.0));
  return area / (8.0 * std::numbers::pi * epsilon);
}

namespace {

struct Schedule {
  std::vector<double> times;
  double dt;
};

Schedule make_schedule(double t_end, double dt_limit, const FlowConfig& config) {
  double dt = dt_limit;
  if (config.max_dt) dt = std::min(dt, *config.max_dt);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  if (config.max_steps && steps > *config.max_steps) {
    std::ostringstream msg;
    msg << "run needs " << steps << " steps, above the limit of " << *config.max_steps;
    fail(ErrorKind::Config, msg.str());
  }
  Schedule s;
  s.dt = t_end / static_cast<double>(steps);
  s.times.resize(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) s.times[k] = static_cast<double>(k) * s.dt;
  s.times[steps] = t_end;
  return s;
}

FlowTrajectory build_surface(const FlowConfig& config) {
  const GridPtr& grid = config.grid;
  if (grid->kind() != BackgroundKind::RotSymSphere)
    fail(ErrorKind::Config, "EpsilonSurface flow needs a RotSymSphere background");
  if (config.epsilon < 0.0) fail(ErrorKind::Config, "epsilon must be >= 0");

  MetricState initial = MetricState::conformal(
      0.0, config.initial_phi ? *config.initial_phi : ScalarField::constant(grid, 0.0));
  check_surface_state(initial, false);

  const auto singular = estimated_surface_singular_time(initial, config.epsilon);
  double t_end = 0.0;
  if (config.t_end) {
    t_end = *config.t_end;
  } else if (singular) {
    t_end = 0.9 * *singular;
  } else {
    fail(ErrorKind::Config, "static surface run needs an explicit t_end");
  }
  if (!(t_end > 0.0)) fail(ErrorKind::Config, "t_end must be positive");
  if (singular && t_end >= *singular) {
    std::ostringstream msg;
    msg << "t_end=" << t_end << " is not before the estimated singular time " << *singular;
    fail(ErrorKind::Config, msg.str());
  }

  // The conformal factor shrinks roughly like 1 - t/T; budget for it up front
  // so the fixed step stays inside the limit for the whole run. The estimate
  // can be slightly optimistic, so a run whose step outgrows the limit of a
  // later state is redone with the step cut by the observed ratio.
  const double shrink = singular ? 1.0 - t_end / *singular : 1.0;
  double dt_limit = stability_limit(initial, config.sigma) * shrink;
  const bool positive = initial.scalar_curvature().min() > 0.0;

  for (int attempt = 0;; ++attempt) {
    const Schedule sched = make_schedule(t_end, dt_limit, config);
    std::vector<MetricState> states;
    std::vector<MetricState> mids;
    states.reserve(sched.times.size());
    mids.reserve(sched.times.size() - 1);
    states.push_back(initial);
    double worst = 1.0;  // largest dt / limit seen
    for (std::size_t k = 0; k + 1 < sched.times.size(); ++k) {
      const MetricState& cur = states.back();
      const double dt = sched.times[k + 1] - sched.times[k];
      worst = std::max(worst, dt / stability_limit(cur, config.sigma));
      if (worst > 1.0) break;
      MetricState mid = step_surface_flow(cur, 0.5 * dt, config.epsilon, config.sigma);
      MetricState next = step_surface_flow(mid, 0.5 * dt, config.epsilon, config.sigma);
      if (positive) check_surface_state(next, true);
      // Pin stored times to the schedule.
      MetricState pinned = MetricState::conformal(sched.times[k + 1], next.phi());
      mids.push_back(std::move(mid));
      states.push_back(std::move(pinned));
    }
    if (worst <= 1.0)
      worst = std::max(worst, sched.dt / stability_limit(states.back(), config.sigma));
    if (worst <= 1.0) {
      return FlowTrajectory(FlowKind::EpsilonSurface, config.epsilon, singular, sched.times,
                            std::move(states), std::move(mids));
    }
    if (attempt == 4) {
      std::ostringstream msg;
      msg << "surface flow step keeps exceeding the parabolic limit (ratio " << worst
          << ") up to t=" << states.back().time();
      fail(ErrorKind::Stability, msg.str());
    }
    dt_limit = std::min(dt_limit, sched.dt) / (1.05 * worst);
  }
}

FlowTrajectory build_shrinking(const FlowConfig& config) {
  const GridPtr& grid = config.grid;
  if (grid->kind() != BackgroundKind::RoundSphere)
    fail(ErrorKind::Config, "ShrinkingSphere flow needs a RoundSphere background");
  const int n = grid->dimension();
  const double blowup = shrinking_sphere_blowup_time(n);
  const double t_end = config.t_end.value_or(0.9 * blowup);
  if (!(t_end > 0.0)) fail(ErrorKind::Config, "t_end must be positive");
  if (t_end >= blowup) {
    std::ostringstream msg;
    msg << "t_end=" << t_end << " is not before the blow-up time " << blowup;
    fail(ErrorKind::Config, msg.str());
  }
  const MetricState last = shrinking_sphere_state(grid, t_end);
  const Schedule sched = make_schedule(t_end, stability_limit(last, config.sigma), config);

  std::vector<MetricState> states;
  std::vector<MetricState> mids;
  for (std::size_t k = 0; k < sched.times.size(); ++k) {
    states.push_back(shrinking_sphere_state(grid, sched.times[k]));
    if (k + 1 < sched.times.size())
      mids.push_back(shrinking_sphere_state(grid, 0.5 * (sched.times[k] + sched.times[k + 1])));
  }
  return FlowTrajectory(FlowKind::ShrinkingSphere, 1.0, blowup, sched.times, std::move(states),
                        std::move(mids));
}

FlowTrajectory build_flat(const FlowConfig& config) {
  const GridPtr& grid = config.grid;
  if (grid->kind() != BackgroundKind::FlatTorus)
    fail(ErrorKind::Config, "StaticFlat flow needs a FlatTorus background");
  const double t_end = config.t_end.value_or(1.0);
  if (!(t_end > 0.0)) fail(ErrorKind::Config, "t_end must be positive");
  const Schedule sched =
      make_schedule(t_end, stability_limit(MetricState::flat(0.0, grid), config.sigma), config);

  std::vector<MetricState> states;
  std::vector<MetricState> mids;
  for (std::size_t k = 0; k < sched.times.size(); ++k) {
    states.push_back(MetricState::flat(sched.times[k], grid));
    if (k + 1 < sched.times.size())
      mids.push_back(MetricState::flat(0.5 * (sched.times[k] + sched.times[k + 1]), grid));
  }
  return FlowTrajectory(FlowKind::StaticFlat, 1.0, std::nullopt, sched.times, std::move(states),
                        std::move(mids));
}

}  // namespace

FlowTrajectory build_trajectory(const FlowConfig& config) {
  if (!config.grid) fail(ErrorKind::Config, "flow configuration without a grid");
  switch (config.kind) {
    case FlowKind::EpsilonSurface: return build_surface(config);
    case FlowKind::ShrinkingSphere: return build_shrinking(config);
    case FlowKind::StaticFlat: return build_flat(config);
  }
  fail(ErrorKind::Config, "unknown flow kind");
}

TypeIBound type_one_constant(const FlowTrajectory& traj) {
  if (traj.kind() != FlowKind::ShrinkingSphere)
    fail(ErrorKind::Unsupported,
         "type-I constant is only defined for the shrinking sphere, not " +
             std::string(to_string(traj.kind())));
  const int n = traj.dimension();
  const double blowup = shrinking_sphere_blowup_time(n);
  // Constant curvature: |Rm|^2 = 2 n (n-1) / c^2.
  double d0 = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const MetricState& s = traj.state(k);
    const double rm = std::sqrt(2.0 * n * (n - 1.0)) / s.scale();
    d0 = std::max(d0, rm * (blowup - s.time()));
  }
  return {d0, blowup};
}

}  // namespace hlab
