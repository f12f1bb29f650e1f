#include "hlab/harnack.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"

namespace hlab {

std::string_view to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::Heps: return "Heps";
    case QuantityKind::H2R: return "H2R";
    case QuantityKind::H2R_typeI: return "H2R_typeI";
    case QuantityKind::HR: return "HR";
    case QuantityKind::HR_typeI: return "HR_typeI";
    case QuantityKind::P_shifted: return "P_shifted";
    case QuantityKind::GradForward: return "GradForward";
    case QuantityKind::GradBackward: return "GradBackward";
  }
  return "unknown";
}

QuantityKind quantity_from_string(std::string_view name) {
  for (auto k : {QuantityKind::Heps, QuantityKind::H2R, QuantityKind::H2R_typeI, QuantityKind::HR,
                 QuantityKind::HR_typeI, QuantityKind::P_shifted, QuantityKind::GradForward,
                 QuantityKind::GradBackward}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::Config, "unknown Harnack quantity '" + std::string(name) + "'");
}

Clock HarnackQuantity::clock() const {
  return (kind == QuantityKind::Heps || kind == QuantityKind::GradForward) ? Clock::T : Clock::Tau;
}

double HarnackQuantity::bound(const FlowTrajectory& flow, std::size_t k) const {
  const double n = flow.dimension();
  switch (kind) {
    case QuantityKind::Heps: return 1.0 / flow.time(k);
    case QuantityKind::H2R:
    case QuantityKind::H2R_typeI: return 0.5 * n;
    case QuantityKind::HR:
    case QuantityKind::HR_typeI:
    case QuantityKind::P_shifted: return 0.25 * n;
    case QuantityKind::GradForward:
    case QuantityKind::GradBackward: return 0.0;
  }
  return 0.0;
}

bool HarnackQuantity::valid_at(const FlowTrajectory& flow, std::size_t k) const {
  const double t = flow.time(k);
  const double tau = flow.end_time() - t;
  if (clock() == Clock::T) return t > 0.0;
  if (kind == QuantityKind::P_shifted) return tau > 0.0 && t >= 0.5 * flow.end_time();
  return tau > 0.0;
}

Direction HarnackQuantity::direction() const {
  return clock() == Clock::T ? Direction::ForwardInT : Direction::ForwardInTau;
}

double HarnackQuantity::potential_coefficient() const {
  switch (kind) {
    case QuantityKind::Heps: return epsilon;
    case QuantityKind::H2R:
    case QuantityKind::H2R_typeI: return 2.0;
    case QuantityKind::HR:
    case QuantityKind::HR_typeI:
    case QuantityKind::P_shifted: return 1.0;
    case QuantityKind::GradForward:
    case QuantityKind::GradBackward: return 0.0;
  }
  return 0.0;
}

std::string HarnackQuantity::label() const {
  std::ostringstream s;
  s << to_string(kind);
  if (kind == QuantityKind::Heps) s << "_eps" << epsilon;
  if (kind == QuantityKind::H2R_typeI || kind == QuantityKind::HR_typeI) s << "_d" << d;
  return s.str();
}

void require_matching_heat(const HarnackQuantity& q, const HeatTrajectory& heat) {
  if (heat.direction() != q.direction() ||
      heat.potential_coefficient() != q.potential_coefficient() ||
      heat.decay_coefficient() != 1.0) {
    std::ostringstream msg;
    msg << q.label() << " is stated for the " << to_string(q.direction())
        << " equation with potential coefficient " << q.potential_coefficient()
        << " and decay 1; got " << to_string(heat.direction()) << " with q="
        << heat.potential_coefficient() << ", a=" << heat.decay_coefficient();
    fail(ErrorKind::Unsupported, msg.str());
  }
}

void require_shared_schedule(const FlowTrajectory& flow, const HeatTrajectory& heat) {
  if (heat.size() != flow.size() || heat.end_time() != flow.end_time())
    fail(ErrorKind::Dimension, "heat trajectory was not computed on this flow's schedule");
  require_same_grid(flow.grid(), heat.u(0).grid(), "harnack");
}

namespace {

// 2 Delta w - |grad w|^2 + c R
ScalarField li_yau_core(const MetricState& m, const ScalarField& w, double curvature_weight) {
  ScalarField out = 2.0 * laplacian(m, w) - grad_norm_sq(m, w);
  out += curvature_weight * m.scalar_curvature();
  return out;
}

}  // namespace

ScalarField evaluate(const HarnackQuantity& q, const FlowTrajectory& flow,
                     const HeatTrajectory& heat, std::size_t k) {
  require_shared_schedule(flow, heat);
  if (!q.valid_at(flow, k)) {
    std::ostringstream msg;
    msg << q.label() << " is outside its validity window at t=" << flow.time(k);
    fail(ErrorKind::Domain, msg.str());
  }
  const MetricState& m = flow.state(k);
  const ScalarField& u = heat.u(k);
  const double n = flow.dimension();
  const double t = flow.time(k);
  const double tau = flow.end_time() - t;

  switch (q.kind) {
    case QuantityKind::Heps: return laplacian(m, u) - q.epsilon * m.scalar_curvature();
    case QuantityKind::H2R: return li_yau_core(m, u, 2.0) - 2.0 * n / tau;
    case QuantityKind::H2R_typeI: return li_yau_core(m, u, 2.0) - q.d * n / tau;
    case QuantityKind::HR: return li_yau_core(m, u, 1.0) - 2.0 * n / tau;
    case QuantityKind::HR_typeI: return li_yau_core(m, u, 1.0) - q.d * n / tau;
    case QuantityKind::P_shifted: {
      const ScalarField v = u - 0.5 * n * std::log(4.0 * std::numbers::pi * tau);
      return li_yau_core(m, v, 1.0) - 3.0 * n / tau;
    }
    case QuantityKind::GradForward: return grad_norm_sq(m, u) - u * (1.0 / t);
    case QuantityKind::GradBackward: return grad_norm_sq(m, u) - u * (1.0 / tau);
  }
  fail(ErrorKind::Unsupported, "unknown quantity");
}

ScalarField evaluate_at_time(const HarnackQuantity& q, const FlowTrajectory& flow,
                             const HeatTrajectory& heat, double t) {
  return evaluate(q, flow, heat, flow.index_of(t));
}

double HarnackReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : records) m = std::min(m, r.margin);
  return m;
}

namespace {

HarnackRecord make_record(const FlowTrajectory& flow, std::size_t k, Clock clock,
                          const ScalarField& field, double bound) {
  std::size_t arg = 0;
  for (std::size_t j = 1; j < field.size(); ++j)
    if (field[j] > field[arg]) arg = j;
  const double t = flow.time(k);
  return {t,
          clock == Clock::T ? t : flow.end_time() - t,
          field[arg],
          bound,
          bound - field[arg],
          field.grid().node(arg)};
}

void note_violation(HarnackReport& rep, const HarnackRecord& r) {
  if (!rep.violation && r.margin < -rep.tolerance)
    rep.violation = Violation{r.time, r.argmax, -r.margin};
}

}  // namespace

HarnackReport monitor(const HarnackQuantity& q, const FlowTrajectory& flow,
                      const HeatTrajectory& heat, const MonitorOptions& options) {
  require_shared_schedule(flow, heat);
  HarnackReport rep;
  rep.label = q.label();
  rep.tolerance = options.tolerance.value(flow.grid().spacing());
  rep.bound_shift = options.bound_shift;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    if (!q.valid_at(flow, k)) continue;
    const double t = flow.time(k);
    if (options.t_min && t < *options.t_min) continue;
    if (options.t_max && t > *options.t_max) continue;
    const ScalarField field = evaluate(q, flow, heat, k);
    rep.records.push_back(
        make_record(flow, k, q.clock(), field, q.bound(flow, k) - options.bound_shift));
    note_violation(rep, rep.records.back());
  }
  return rep;
}

std::size_t type_one_probe_index(const FlowTrajectory& flow) {
  if (flow.steps() < 6) fail(ErrorKind::Domain, "type-I probe needs at least 6 steps");
  return flow.steps() - 5;
}

int choose_type_one_d(QuantityKind variant, const FlowTrajectory& flow,
                      const HeatTrajectory& heat) {
  if (variant != QuantityKind::H2R_typeI && variant != QuantityKind::HR_typeI)
    fail(ErrorKind::Unsupported, "type-I search needs H2R_typeI or HR_typeI");
  if (flow.kind() == FlowKind::EpsilonSurface)
    fail(ErrorKind::Unsupported, "type-I search needs a flow with a known type-I bound");
  const std::size_t probe = type_one_probe_index(flow);
  const int first = variant == QuantityKind::H2R_typeI ? 2 : 1;
  HarnackQuantity q{variant, 0.0, 0.0};
  for (int d = first; d <= 64; ++d) {
    q.d = d;
    if (evaluate(q, flow, heat, probe).max() < 0.0) return d;
  }
  fail(ErrorKind::SearchFailure, "no d <= 64 makes " + std::string(to_string(variant)) +
                                     " negative at the probe time");
}

// --- identities --------------------------------------------------------------

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::Heps_evolution: return "Heps_evolution";
    case IdentityId::H2R_evolution: return "H2R_evolution";
    case IdentityId::HR_evolution: return "HR_evolution";
    case IdentityId::P_evolution: return "P_evolution";
    case IdentityId::Grad_forward_evolution: return "Grad_forward_evolution";
    case IdentityId::Grad_backward_evolution: return "Grad_backward_evolution";
  }
  return "unknown";
}

IdentityId identity_from_string(std::string_view name) {
  for (auto id : {IdentityId::Heps_evolution, IdentityId::H2R_evolution, IdentityId::HR_evolution,
                  IdentityId::P_evolution, IdentityId::Grad_forward_evolution,
                  IdentityId::Grad_backward_evolution}) {
    if (to_string(id) == name) return id;
  }
  fail(ErrorKind::Config, "unknown identity '" + std::string(name) + "'");
}

namespace {

struct HeatShape {
  Direction direction;
  double q;
};

HeatShape expected_heat(IdentityId id, const FlowTrajectory& flow) {
  switch (id) {
    case IdentityId::Heps_evolution: return {Direction::ForwardInT, flow.epsilon()};
    case IdentityId::H2R_evolution: return {Direction::ForwardInTau, 2.0};
    case IdentityId::HR_evolution:
    case IdentityId::P_evolution: return {Direction::ForwardInTau, 1.0};
    case IdentityId::Grad_forward_evolution: return {Direction::ForwardInT, 0.0};
    case IdentityId::Grad_backward_evolution: return {Direction::ForwardInTau, 0.0};
  }
  return {Direction::ForwardInT, 0.0};
}

[[noreturn]] void unsupported_identity(IdentityId id, const FlowTrajectory& flow,
                                       const std::string& why) {
  fail(ErrorKind::Unsupported, std::string(to_string(id)) + " on " +
                                   std::string(to_string(flow.kind())) + ": " + why);
}

// (h1 + shift)^2 + (n-1)(h2 + shift)^2 for the isotropic shift field.
ScalarField shifted_hessian_sq(const HessianDiagonal& h, const ScalarField& shift) {
  const ScalarField a = h.radial + shift;
  const ScalarField b = h.tangential + shift;
  return a * a + static_cast<double>(h.tangential_multiplicity) * b * b;
}

// Centered difference in the quantity's clock (tau runs against the index).
ScalarField clock_derivative(const ScalarField& next, const ScalarField& prev, double span,
                             Clock clock) {
  const double sign = clock == Clock::T ? 1.0 : -1.0;
  return (sign / span) * (next - prev);
}

ScalarField heps_residual(const FlowTrajectory& flow, const HeatTrajectory& heat, std::size_t k) {
  const double eps = flow.epsilon();
  const double span = flow.time(k + 1) - flow.time(k - 1);
  auto quantity = [&](std::size_t i) {
    return laplacian(flow.state(i), heat.u(i)) - eps * flow.state(i).scalar_curvature();
  };
  const ScalarField lhs = clock_derivative(quantity(k + 1), quantity(k - 1), span, Clock::T);

  const MetricState& m = flow.state(k);
  const ScalarField& u = heat.u(k);
  const ScalarField& r = m.scalar_curvature();
  const ScalarField lap_u = laplacian(m, u);
  const ScalarField h = lap_u - eps * r;
  const ScalarField grad_u = grad_norm_sq(m, u);
  const ScalarField dr_dt = eps * (laplacian(m, r) + r * r);

  ScalarField rhs = laplacian(m, h);
  rhs -= 2.0 * shifted_hessian_sq(hessian_diagonal(m, u), -0.5 * eps * r);
  rhs -= eps * r * h;
  rhs -= 2.0 * grad_dot(m, h, u);
  rhs -= 2.0 * eps * grad_dot(m, r, u);
  rhs -= r * grad_u;
  rhs -= eps * dr_dt;
  rhs -= lap_u;
  return lhs - rhs;
}

// Shared right-hand side of the backward Li-Yau type identities:
// Delta Q - 2 grad Q . grad w - (2/tau) Q - (2/tau)|grad w|^2
//   - 2|Hess w + Rc - g/tau|^2 - 2(Delta w - |grad w|^2)
ScalarField backward_li_yau_rhs(const MetricState& m, const ScalarField& w, const ScalarField& q,
                                double tau) {
  const ScalarField rho = ricci_eigenvalue(m);
  const ScalarField lap_w = laplacian(m, w);
  const ScalarField grad_w = grad_norm_sq(m, w);
  ScalarField rhs = laplacian(m, q);
  rhs -= 2.0 * grad_dot(m, q, w);
  rhs -= (2.0 / tau) * q;
  rhs -= (2.0 / tau) * grad_w;
  rhs -= 2.0 * shifted_hessian_sq(hessian_diagonal(m, w), rho - 1.0 / tau);
  rhs -= 2.0 * (lap_w - grad_w);
  return rhs;
}

ScalarField backward_li_yau_residual(IdentityId id, const FlowTrajectory& flow,
                                     const HeatTrajectory& heat, std::size_t k) {
  const double n = flow.dimension();
  const double span = flow.time(k + 1) - flow.time(k - 1);
  const double curvature_weight = id == IdentityId::H2R_evolution ? 2.0 : 1.0;
  // Explicit multiple of n/tau in the quantity; its tau-derivative is taken exactly.
  const double pole = id == IdentityId::P_evolution ? 3.0 : 2.0;

  auto shifted = [&](std::size_t i) {
    if (id != IdentityId::P_evolution) return heat.u(i);
    const double tau_i = flow.end_time() - flow.time(i);
    return heat.u(i) - 0.5 * n * std::log(4.0 * std::numbers::pi * tau_i);
  };
  auto core = [&](std::size_t i) { return li_yau_core(flow.state(i), shifted(i), curvature_weight); };

  const double tau = flow.end_time() - flow.time(k);
  ScalarField lhs = clock_derivative(core(k + 1), core(k - 1), span, Clock::Tau);
  lhs += pole * n / (tau * tau);

  const MetricState& m = flow.state(k);
  const ScalarField w = shifted(k);
  const ScalarField q = core(k) - pole * n / tau;
  ScalarField rhs = backward_li_yau_rhs(m, w, q, tau);
  switch (id) {
    case IdentityId::H2R_evolution: rhs -= 2.0 * ricci_norm_sq(m); break;
    case IdentityId::HR_evolution: rhs -= (2.0 / tau) * m.scalar_curvature(); break;
    case IdentityId::P_evolution:
      rhs -= (2.0 / tau) * m.scalar_curvature();
      rhs -= n / (tau * tau);
      break;
    default: break;
  }
  return lhs - rhs;
}

ScalarField gradient_residual(IdentityId id, const FlowTrajectory& flow, const HeatTrajectory& heat,
                              std::size_t k) {
  const bool forward = id == IdentityId::Grad_forward_evolution;
  const Clock clock = forward ? Clock::T : Clock::Tau;
  const double span = flow.time(k + 1) - flow.time(k - 1);
  const double s = forward ? flow.time(k) : flow.end_time() - flow.time(k);

  auto grad_sq = [&](std::size_t i) { return grad_norm_sq(flow.state(i), heat.u(i)); };
  // d/ds (|grad u|^2 - u/s) with the explicit 1/s handled by the product rule.
  const ScalarField& u = heat.u(k);
  ScalarField lhs = clock_derivative(grad_sq(k + 1), grad_sq(k - 1), span, clock);
  lhs -= (1.0 / s) * clock_derivative(heat.u(k + 1), heat.u(k - 1), span, clock);
  lhs += (1.0 / (s * s)) * u;

  const MetricState& m = flow.state(k);
  const ScalarField grad_u = grad_norm_sq(m, u);
  const ScalarField h = grad_u - (1.0 / s) * u;
  ScalarField rhs = laplacian(m, h);
  rhs -= 2.0 * grad_dot(m, h, u);
  rhs -= (1.0 / s + 1.0) * h;
  rhs -= 2.0 * hessian_norm_sq(m, u);
  rhs -= grad_u;
  if (!forward) rhs -= 4.0 * ricci_eigenvalue(m) * grad_u;
  return lhs - rhs;
}

}  // namespace

void require_identity_supported(IdentityId id, const FlowTrajectory& flow,
                                const HeatTrajectory& heat) {
  require_shared_schedule(flow, heat);
  switch (id) {
    case IdentityId::Heps_evolution:
      if (flow.kind() != FlowKind::EpsilonSurface)
        unsupported_identity(id, flow, "needs the conformal surface flow");
      break;
    case IdentityId::H2R_evolution:
    case IdentityId::HR_evolution:
    case IdentityId::P_evolution:
      if (flow.kind() != FlowKind::StaticFlat)
        unsupported_identity(id, flow, "full-tensor term is assembled on the flat torus only");
      break;
    case IdentityId::Grad_forward_evolution:
    case IdentityId::Grad_backward_evolution:
      if (!flow.is_ricci_flow()) unsupported_identity(id, flow, "needs a Ricci flow background");
      break;
  }
  const HeatShape want = expected_heat(id, flow);
  if (heat.direction() != want.direction || heat.potential_coefficient() != want.q ||
      heat.decay_coefficient() != 1.0) {
    std::ostringstream msg;
    msg << "needs the " << to_string(want.direction) << " equation with q=" << want.q
        << ", a=1";
    unsupported_identity(id, flow, msg.str());
  }
}

ScalarField identity_residual(IdentityId id, const FlowTrajectory& flow,
                              const HeatTrajectory& heat, std::size_t k) {
  require_identity_supported(id, flow, heat);
  if (k < 1 || k + 1 >= flow.size())
    fail(ErrorKind::Domain, "identity residual needs an interior schedule index");
  switch (id) {
    case IdentityId::Heps_evolution: return heps_residual(flow, heat, k);
    case IdentityId::H2R_evolution:
    case IdentityId::HR_evolution:
    case IdentityId::P_evolution: return backward_li_yau_residual(id, flow, heat, k);
    case IdentityId::Grad_forward_evolution:
      if (k < 2) fail(ErrorKind::Domain, "forward gradient identity needs t_{k-1} > 0");
      return gradient_residual(id, flow, heat, k);
    case IdentityId::Grad_backward_evolution:
      if (k + 2 >= flow.size()) fail(ErrorKind::Domain, "backward gradient identity needs tau_{k+1} > 0");
      return gradient_residual(id, flow, heat, k);
  }
  fail(ErrorKind::Unsupported, "unknown identity");
}

IdentityResidual identity_residual_series(IdentityId id, const FlowTrajectory& flow,
                                          const HeatTrajectory& heat,
                                          const std::vector<double>& times) {
  IdentityResidual out{id, {}, {}};
  for (double t : times) {
    const std::size_t k = flow.index_of(t);
    out.times.push_back(flow.time(k));
    out.max_residual.push_back(identity_residual(id, flow, heat, k).max_abs());
  }
  return out;
}

// --- flow-side checks ------------------------------------------------------------

ScalarField trace_harnack(const FlowTrajectory& flow, std::size_t k) {
  const MetricState& m = flow.state(k);
  const ScalarField& r = m.scalar_curvature();
  if (r.min() <= 0.0) fail(ErrorKind::Domain, "trace Harnack needs R > 0");
  if (k == 0) fail(ErrorKind::Domain, "trace Harnack needs t > 0");
  const ScalarField log_r = r.map([](double v) { return std::log(v); });
  return flow.epsilon() * (laplacian(m, log_r) + r) + 1.0 / flow.time(k);
}

HarnackReport trace_harnack_monitor(const FlowTrajectory& flow, double tolerance) {
  HarnackReport rep;
  rep.label = "TraceHarnack";
  rep.tolerance = tolerance;
  for (std::size_t k = 1; k < flow.size(); ++k) {
    const double inv_t = 1.0 / flow.time(k);
    // sup of -eps(Delta ln R + R) against the bound 1/t
    const ScalarField q = -(trace_harnack(flow, k) - inv_t);
    rep.records.push_back(make_record(flow, k, Clock::T, q, inv_t));
    note_violation(rep, rep.records.back());
  }
  return rep;
}

ScalarField curvature_evolution_residual(const FlowTrajectory& flow, std::size_t k) {
  if (flow.kind() != FlowKind::EpsilonSurface)
    fail(ErrorKind::Unsupported, "curvature evolution check is for surface flows");
  if (k < 1 || k + 1 >= flow.size())
    fail(ErrorKind::Domain, "curvature evolution residual needs an interior index");
  const double span = flow.time(k + 1) - flow.time(k - 1);
  const MetricState& m = flow.state(k);
  const ScalarField& r = m.scalar_curvature();
  const ScalarField dr =
      (1.0 / span) * (flow.state(k + 1).scalar_curvature() - flow.state(k - 1).scalar_curvature());
  return dr - flow.epsilon() * (laplacian(m, r) + r * r);
}

ScalarField li_yau_form(const FlowTrajectory& flow, const HeatTrajectory& heat, std::size_t k) {
  require_shared_schedule(flow, heat);
  const double n = flow.dimension();
  const double tau = flow.end_time() - flow.time(k);
  if (!(tau > 0.0)) fail(ErrorKind::Domain, "Li-Yau form needs tau > 0");
  const MetricState& m = flow.state(k);
  const ScalarField& u = heat.u(k);

  const ScalarField f = heat.f(k);
  const ScalarField df = -1.0 * f * first_derivative(u);  // chain rule: f' = -f u'
  const ScalarField grad_f_sq = m.inverse_metric_factor() * df * df;
  const ScalarField f_tau = -1.0 * f * u_rhs(m, u, 2.0, 1.0, Direction::ForwardInTau);
  const ScalarField log_f = f.map([](double v) { return std::log(v); });

  ScalarField out = grad_f_sq;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] /= f[j] * f[j];
  ScalarField ratio = f_tau;
  for (std::size_t j = 0; j < ratio.size(); ++j) ratio[j] /= f[j];
  out -= 2.0 * (ratio + log_f + m.scalar_curvature());
  out -= 2.0 * n / tau + 0.5 * n;
  return out;
}

// --- integrated inequalities ---------------------------------------------------

std::string_view to_string(PathTheorem t) {
  return t == PathTheorem::Potential2R ? "Potential2R" : "PotentialR";
}

PathTheorem path_theorem_from_string(std::string_view name) {
  if (name == "Potential2R") return PathTheorem::Potential2R;
  if (name == "PotentialR") return PathTheorem::PotentialR;
  fail(ErrorKind::Config, "unknown path theorem '" + std::string(name) + "'");
}

PathHarnackCheck path_harnack_check(PathTheorem theorem, const FlowTrajectory& flow,
                                    const HeatTrajectory& heat, double x1, double t1, double x2,
                                    double t2) {
  require_shared_schedule(flow, heat);
  const double T = flow.end_time();
  if (!(t1 >= 0.0 && t1 < t2 && t2 < T)) {
    std::ostringstream msg;
    msg << "path check needs 0 <= t1 < t2 < T (t1=" << t1 << ", t2=" << t2 << ", T=" << T << ")";
    fail(ErrorKind::Ordering, msg.str());
  }
  const std::size_t k1 = flow.index_of(t1);
  const std::size_t k2 = flow.index_of(t2);
  if (k2 <= k1 || k2 >= flow.steps())
    fail(ErrorKind::Ordering, "path endpoints collapse onto the same schedule point");
  const double s1 = flow.time(k1);
  const double s2 = flow.time(k2);
  const double n = flow.dimension();
  const double curvature_weight = theorem == PathTheorem::Potential2R ? 2.0 : 1.0;
  const double constant = theorem == PathTheorem::Potential2R ? 0.5 * n : 0.25 * n;

  // Simpson on the half-step lattice, where the flow stores exact states.
  const int m = static_cast<int>(2 * (k2 - k1));
  const double half = 0.5 * flow.step_size();
  auto lattice_index = [&](double t) {
    return static_cast<std::size_t>(std::lround(t / half));
  };
  auto metric_at = [&](double t) { return flow.half_state(lattice_index(t)); };
  auto weight = [&](double t) { return std::exp(T - t); };
  const double energy = meridian_path_energy(metric_at, x1, s1, x2, s2, m, weight);

  const double speed = (x2 - x1) / (s2 - s1);
  const double ds = (s2 - s1) / m;
  double potential = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = (i == m) ? s2 : s1 + i * ds;
    const double x = x1 + speed * (t - s1);
    const MetricState& g = flow.half_state(2 * k1 + static_cast<std::size_t>(i));
    const double r = interpolate(g.scalar_curvature(), x);
    potential += simpson_weight(i, m) * std::exp(T - t) *
                 (curvature_weight * r + constant + 2.0 * n / (T - t));
  }
  potential *= ds;

  const double u1 = interpolate(heat.u(k1), x1);
  const double u2 = interpolate(heat.u(k2), x2);
  PathHarnackCheck out{};
  out.x1 = x1;
  out.t1 = s1;
  out.x2 = x2;
  out.t2 = s2;
  out.path_energy = energy;
  out.rhs = 0.5 * (energy + potential);
  out.lhs = std::exp(s2) * (-u2) - std::exp(s1) * (-u1);
  out.slack = out.rhs - out.lhs;
  out.lhs_tau_weighted = std::exp(T - s2) * (-u2) - std::exp(T - s1) * (-u1);
  out.slack_tau_weighted = out.rhs - out.lhs_tau_weighted;
  return out;
}

}  // namespace hlab
