#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/harnack.hpp"

using namespace hlab;

namespace {

FlowTrajectory flat_run(std::size_t N, double t_end, std::optional<double> max_dt = std::nullopt,
                        int n = 2) {
  FlowConfig c;
  c.kind = FlowKind::StaticFlat;
  c.grid = Grid::flat_torus(n, N);
  c.t_end = t_end;
  c.max_dt = max_dt;
  return build_trajectory(c);
}

FlowTrajectory shrinking_run(std::size_t N, double t_end, std::optional<double> max_dt = std::nullopt) {
  FlowConfig c;
  c.kind = FlowKind::ShrinkingSphere;
  c.grid = Grid::round_sphere(2, N);
  c.t_end = t_end;
  c.max_dt = max_dt;
  return build_trajectory(c);
}

FlowTrajectory surface_run(std::size_t N, double eps, double t_end, double amplitude) {
  FlowConfig c;
  c.kind = FlowKind::EpsilonSurface;
  c.grid = Grid::rot_sym_sphere(N);
  c.epsilon = eps;
  c.t_end = t_end;
  c.initial_phi = ScalarField::sample(c.grid, [=](double x) { return amplitude * std::cos(x); });
  return build_trajectory(c);
}

HeatTrajectory run_heat(const FlowTrajectory& flow, Direction d, double q,
                        const std::function<double(double)>& f0) {
  return solve(flow, HeatProblem{d, q, 1.0, ScalarField::sample(flow.grid_ptr(), f0), kDefaultSigma});
}

double constant(double) { return 0.5; }

}  // namespace

TEST_CASE("quantity examples") {
  SUBCASE("H2R on flat with constant data at tau = 1") {
    const auto flow = flat_run(16, 2.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    const auto h = evaluate_at_time({QuantityKind::H2R}, flow, heat, 1.0);
    CHECK(h.max() == doctest::Approx(-4.0));
    CHECK(h.min() == doctest::Approx(-4.0));
  }
  SUBCASE("Heps on the round sphere is -R(t)") {
    const auto flow = surface_run(32, 1.0, 0.3, 0.0);
    const auto heat = run_heat(flow, Direction::ForwardInT, 1.0, constant);
    for (std::size_t k = 1; k < flow.size(); k += 97) {
      const double t = flow.time(k);
      const auto h = evaluate({QuantityKind::Heps, 1.0}, flow, heat, k);
      CHECK(h.max() == doctest::Approx(-2.0 / (1.0 - 2.0 * t)).epsilon(1e-9));
      CHECK(h.max() <= 1.0 / t);
    }
  }
  SUBCASE("P_shifted on flat at tau = 0.5") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 1.0, constant);
    CHECK(evaluate_at_time({QuantityKind::P_shifted}, flow, heat, 0.5).max() ==
          doctest::Approx(-12.0));
  }
  SUBCASE("validity windows") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 1.0, constant);
    CHECK_THROWS_AS(evaluate({QuantityKind::HR}, flow, heat, flow.size() - 1), Error);
    CHECK_THROWS_AS(evaluate_at_time({QuantityKind::P_shifted}, flow, heat, 0.2), Error);
    CHECK_NOTHROW(evaluate_at_time({QuantityKind::P_shifted}, flow, heat, 0.5));
  }
}

TEST_CASE("P_shifted - HR = -n/tau pointwise") {
  const auto flow = flat_run(64, 1.0);
  const auto heat = run_heat(flow, Direction::ForwardInTau, 1.0,
                             [](double x) { return std::exp(-(0.5 + 0.4 * std::sin(x))); });
  for (std::size_t k = flow.size() / 2; k + 1 < flow.size(); k += 31) {
    const double tau = flow.end_time() - flow.time(k);
    const ScalarField d = evaluate({QuantityKind::P_shifted}, flow, heat, k) -
                          evaluate({QuantityKind::HR}, flow, heat, k);
    CHECK(d.max() == doctest::Approx(-2.0 / tau).epsilon(1e-12));
    CHECK(d.min() == doctest::Approx(-2.0 / tau).epsilon(1e-12));
  }
}

TEST_CASE("Li-Yau form equals H2R - n/2") {
  const auto flow = shrinking_run(64, 0.3);
  const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0,
                             [](double x) { return std::exp(-(0.4 + 0.3 * std::cos(2 * x))); });
  for (std::size_t k = 0; k + 1 < flow.size(); k += 101) {
    const ScalarField a = li_yau_form(flow, heat, k);
    const ScalarField b = evaluate({QuantityKind::H2R}, flow, heat, k) - 1.0;
    const double scale = std::max(1.0, b.max_abs());
    CHECK((a - b).max_abs() <= 1e-12 * scale);
  }
}

TEST_CASE("monitor reports") {
  SUBCASE("H2R, flat, constant data: smallest margin at the largest tau") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    const auto rep = monitor({QuantityKind::H2R}, flow, heat);
    CHECK(rep.holds());
    CHECK(rep.records.size() == flow.size() - 1);
    CHECK(rep.min_margin() == doctest::Approx(1.0 + 4.0 / 1.0));
    CHECK(rep.records.back().margin == doctest::Approx(1.0 + 4.0 / flow.step_size()));
  }
  SUBCASE("Heps on a perturbed sphere") {
    const auto flow = surface_run(64, 1.0, 0.3, 0.1);
    const auto heat = run_heat(flow, Direction::ForwardInT, 1.0,
                               [](double x) { return std::exp(-(1.2 + 0.2 * std::cos(x))); });
    const auto rep = monitor({QuantityKind::Heps, 1.0}, flow, heat);
    CHECK(rep.holds());
    CHECK(rep.records.front().time > 0.0);
  }
  SUBCASE("GradForward on flat with sine data") {
    const auto flow = flat_run(64, 1.0);
    const auto heat = run_heat(flow, Direction::ForwardInT, 0.0,
                               [](double x) { return std::exp(-(1.5 + 0.3 * std::sin(x))); });
    CHECK(monitor({QuantityKind::GradForward}, flow, heat).holds());
  }
  SUBCASE("window and bound shift") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    MonitorOptions o;
    o.t_min = 0.25;
    o.t_max = 0.5;
    const auto rep = monitor({QuantityKind::H2R}, flow, heat, o);
    CHECK(rep.records.front().time >= 0.25);
    CHECK(rep.records.back().time <= 0.5);
    // Tightening by twice the smallest margin must produce a violation.
    o.bound_shift = 2.0 * rep.min_margin();
    const auto shifted = monitor({QuantityKind::H2R}, flow, heat, o);
    REQUIRE_FALSE(shifted.holds());
    CHECK(shifted.violation->magnitude == doctest::Approx(rep.min_margin()));
  }
  SUBCASE("mismatched heat equation") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 1.0, constant);
    CHECK_THROWS_AS(require_matching_heat({QuantityKind::H2R}, heat), Error);
    CHECK_NOTHROW(require_matching_heat({QuantityKind::HR}, heat));
  }
}

TEST_CASE("blow-down as tau -> 0") {
  const auto flow = shrinking_run(64, 0.3);
  const auto heat2 = run_heat(flow, Direction::ForwardInTau, 2.0,
                              [](double x) { return std::exp(-(0.4 + 0.3 * std::cos(2 * x))); });
  const auto heat1 = run_heat(flow, Direction::ForwardInTau, 1.0,
                              [](double x) { return std::exp(-(0.4 + 0.3 * std::cos(2 * x))); });
  const std::vector<std::pair<HarnackQuantity, const HeatTrajectory*>> cases = {
      {{QuantityKind::H2R}, &heat2},
      {{QuantityKind::H2R_typeI, 0.0, 3.0}, &heat2},
      {{QuantityKind::HR}, &heat1},
      {{QuantityKind::HR_typeI, 0.0, 1.0}, &heat1},
      {{QuantityKind::P_shifted}, &heat1}};
  for (const auto& [q, heat] : cases) {
    const auto rep = monitor(q, flow, *heat);
    const auto& r = rep.records;
    REQUIRE(r.size() > 10);
    for (std::size_t i = r.size() - 10; i + 1 < r.size(); ++i) CHECK(r[i + 1].sup < r[i].sup);
    CHECK(r.back().sup < -1000.0);
  }
}

TEST_CASE("type-I d search") {
  SUBCASE("constant data on the shrinking sphere returns 2") {
    const auto flow = shrinking_run(32, 0.4, 1e-3);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    CHECK(choose_type_one_d(QuantityKind::H2R_typeI, flow, heat) == 2);
    // threshold: 2R - d n / tau < 0 at the probe
    const std::size_t probe = type_one_probe_index(flow);
    const double tau = flow.end_time() - flow.time(probe);
    CHECK(tau == doctest::Approx(5 * flow.step_size()));
    const double r = 2.0 / (1.0 - 2.0 * flow.time(probe));
    CHECK(2.0 * r < 2.0 * 2.0 / tau);
  }
  SUBCASE("HR variant on flat returns 1") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 1.0, constant);
    CHECK(choose_type_one_d(QuantityKind::HR_typeI, flow, heat) == 1);
  }
  SUBCASE("steep data still gives a small d") {
    const auto flow = shrinking_run(64, 0.3);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0,
                               [](double x) { return std::exp(-(2.0 + 1.5 * std::cos(4 * x))); });
    CHECK(choose_type_one_d(QuantityKind::H2R_typeI, flow, heat) <= 3);
  }
  SUBCASE("no working d") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    std::vector<ScalarField> u(flow.size(), ScalarField::sample(flow.grid_ptr(), [](double x) {
                                 return 1e6 * std::cos(x);
                               }));
    const HeatTrajectory fake(Direction::ForwardInTau, 2.0, 1.0, flow.end_time(), flow.schedule(),
                              std::move(u));
    try {
      choose_type_one_d(QuantityKind::H2R_typeI, flow, fake);
      FAIL("expected a search failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SearchFailure);
    }
  }
  SUBCASE("surface flows have no type-I bound") {
    const auto flow = surface_run(16, 1.0, 0.1, 0.1);
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    CHECK_THROWS_AS(choose_type_one_d(QuantityKind::H2R_typeI, flow, heat), Error);
  }
}

TEST_CASE("identity residuals") {
  SUBCASE("constant data on flat: backward identities vanish, gradient ones are O(dt^2)") {
    const auto flow = flat_run(16, 1.0, 1e-2);
    const double dt = flow.step_size();
    const auto b2 = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    const auto b1 = run_heat(flow, Direction::ForwardInTau, 1.0, constant);
    const auto fwd = run_heat(flow, Direction::ForwardInT, 0.0, constant);
    const auto bwd = run_heat(flow, Direction::ForwardInTau, 0.0, constant);
    const std::size_t k = flow.index_of(0.6);
    CHECK(identity_residual(IdentityId::H2R_evolution, flow, b2, k).max_abs() <= 1e-10);
    CHECK(identity_residual(IdentityId::HR_evolution, flow, b1, k).max_abs() <= 1e-10);
    CHECK(identity_residual(IdentityId::P_evolution, flow, b1, k).max_abs() <= 1e-10);
    CHECK(identity_residual(IdentityId::Grad_forward_evolution, flow, fwd, k).max_abs() <= dt * dt);
    CHECK(identity_residual(IdentityId::Grad_backward_evolution, flow, bwd, k).max_abs() <= dt * dt);
  }
  SUBCASE("Heps identity on the static round sphere") {
    const auto flow = surface_run(64, 0.0, 0.2, 0.0);
    const auto heat = run_heat(flow, Direction::ForwardInT, 0.0,
                               [](double x) { return std::exp(-(0.5 + 0.3 * std::cos(x))); });
    const std::size_t k = flow.size() / 2;
    CHECK(identity_residual(IdentityId::Heps_evolution, flow, heat, k).max_abs() <=
          Tolerance{}.value(flow.grid().spacing()));
  }
  SUBCASE("forward gradient identity converges at second order") {
    auto residual = [](std::size_t N) {
      const auto flow = flat_run(N, 1.0);
      const auto heat = run_heat(flow, Direction::ForwardInT, 0.0,
                                 [](double x) { return std::exp(-(1.5 + 0.3 * std::sin(x))); });
      return identity_residual(IdentityId::Grad_forward_evolution, flow, heat,
                               flow.steps() / 2).max_abs();
    };
    const double e1 = residual(64), e2 = residual(128), e3 = residual(256);
    CHECK(oracle::order(e1, e2) >= 1.9);
    CHECK(oracle::order(e2, e3) >= 1.9);
  }
  SUBCASE("unsupported combinations") {
    const auto sphere = shrinking_run(16, 0.3);
    const auto heat = run_heat(sphere, Direction::ForwardInTau, 2.0, constant);
    CHECK_THROWS_AS(identity_residual(IdentityId::H2R_evolution, sphere, heat, 5), Error);
    const auto flat = flat_run(16, 1.0);
    const auto wrong = run_heat(flat, Direction::ForwardInT, 0.0, constant);
    CHECK_THROWS_AS(identity_residual(IdentityId::H2R_evolution, flat, wrong, 5), Error);
    CHECK_THROWS_AS(identity_residual(IdentityId::Heps_evolution, flat, wrong, 5), Error);
  }
}

TEST_CASE("trace Harnack along surface flows") {
  for (double eps : {0.25, 1.0}) {
    const auto flow = surface_run(64, eps, 0.3, 0.1);
    const auto rep = trace_harnack_monitor(flow, 1e-4);
    CHECK(rep.holds());
    for (std::size_t k = 1; k < flow.size(); k += 200) CHECK(trace_harnack(flow, k).min() >= -1e-4);
  }
}

TEST_CASE("path checks") {
  const double u0 = -std::log(0.5);
  const int n = 2;
  const auto flow = flat_run(16, 1.0, 1e-3);
  const double T = flow.end_time();

  SUBCASE("closed forms on flat with constant data") {
    for (auto [theorem, q, c] : {std::tuple{PathTheorem::Potential2R, 2.0, 0.5 * n},
                                 std::tuple{PathTheorem::PotentialR, 1.0, 0.25 * n}}) {
      const auto heat = run_heat(flow, Direction::ForwardInTau, q, constant);
      const double t1 = 0.2, t2 = 0.7;
      const auto ch = path_harnack_check(theorem, flow, heat, 1.0, t1, 1.0, t2);
      // u(tau) = u0 e^{-tau} = u0 e^{t - T}
      const double lhs = -u0 * (std::exp(2 * t2 - T) - std::exp(2 * t1 - T));
      // 1/2 int e^{T-t}(c + 2n/(T-t)) dt, with s = T - t
      const double rhs = 0.5 * (c * (std::exp(T - t1) - std::exp(T - t2)) +
                                2.0 * n * (std::expint(T - t1) - std::expint(T - t2)));
      CHECK(std::abs(ch.lhs - lhs) <= 1e-8 * std::abs(lhs));
      CHECK(std::abs(ch.rhs - rhs) <= 1e-8 * rhs);
      CHECK(std::abs(ch.slack - (rhs - lhs)) <= 1e-6);
      CHECK(ch.path_energy == 0.0);
      const double tau_lhs = -u0 * (std::exp(0.0) - std::exp(0.0)) ;
      CHECK(std::abs(ch.lhs_tau_weighted - tau_lhs) <= 1e-12);
    }
  }
  SUBCASE("moving endpoint adds the kinetic term") {
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    const auto still = path_harnack_check(PathTheorem::Potential2R, flow, heat, 0.0, 0.2, 0.0, 0.7);
    const auto moving = path_harnack_check(PathTheorem::Potential2R, flow, heat, 0.0, 0.2, 1.0, 0.7);
    // |gamma'|^2 = 4, weighted by e^{T-t}: 2 (e^{0.8} - e^{0.3}) after the factor 1/2
    const double kinetic = 4.0 * (std::exp(0.8) - std::exp(0.3));
    CHECK(moving.path_energy == doctest::Approx(kinetic).epsilon(1e-9));
    CHECK(moving.rhs - still.rhs == doctest::Approx(0.5 * kinetic).epsilon(1e-9));
  }
  SUBCASE("one-step interval") {
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    const double t1 = flow.time(400), t2 = flow.time(401);
    const auto ch = path_harnack_check(PathTheorem::Potential2R, flow, heat, 2.0, t1, 2.0, t2);
    CHECK(ch.slack >= 0.0);
    CHECK(std::abs(ch.lhs) < 10 * flow.step_size());
    CHECK(std::abs(ch.rhs) < 10 * flow.step_size());
  }
  SUBCASE("ordering") {
    const auto heat = run_heat(flow, Direction::ForwardInTau, 2.0, constant);
    try {
      path_harnack_check(PathTheorem::Potential2R, flow, heat, 0.0, 0.5, 0.0, 0.4);
      FAIL("expected an ordering error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Ordering);
    }
    CHECK_THROWS_AS(path_harnack_check(PathTheorem::Potential2R, flow, heat, 0.0, 0.5, 0.0, 1.0),
                    Error);
  }
  SUBCASE("antipodal meridian on the shrinking sphere") {
    const auto sphere = shrinking_run(64, 0.3);
    const auto heat = run_heat(sphere, Direction::ForwardInTau, 1.0,
                               [](double x) { return std::exp(-(0.4 + 0.3 * std::cos(2 * x))); });
    const auto& g = sphere.grid();
    const auto ch = path_harnack_check(PathTheorem::PotentialR, sphere, heat, g.node(0),
                                       sphere.time(100), g.node(g.size() - 1), sphere.time(1200));
    CHECK(ch.slack >= -Tolerance{}.value(g.spacing()));
  }
}
