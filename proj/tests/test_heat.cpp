#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/heat.hpp"
#include "hlab/runner.hpp"

using namespace hlab;

namespace {

FlowTrajectory flat_run(std::size_t N, double t_end, std::optional<double> max_dt = std::nullopt) {
  FlowConfig c;
  c.kind = FlowKind::StaticFlat;
  c.grid = Grid::flat_torus(2, N);
  c.t_end = t_end;
  c.max_dt = max_dt;
  return build_trajectory(c);
}

HeatProblem problem(Direction d, double q, ScalarField f0) {
  return HeatProblem{d, q, 1.0, std::move(f0), kDefaultSigma};
}

ScalarField sine_data(const GridPtr& g) {
  return ScalarField::sample(g, [](double x) { return std::exp(-(1.5 + 0.3 * std::sin(x))); });
}

}  // namespace

TEST_CASE("u right-hand side examples") {
  const GridPtr t = Grid::flat_torus(2, 64);
  const auto flat = MetricState::flat(0.0, t);
  const auto u0 = ScalarField::constant(t, 0.7);
  CHECK(u_rhs(flat, u0, 3.0, 1.0, Direction::ForwardInT).max() == doctest::Approx(-0.7));
  CHECK(u_rhs(flat, u0, 3.0, 1.0, Direction::ForwardInT).min() == doctest::Approx(-0.7));

  const GridPtr s = Grid::rot_sym_sphere(64);
  const auto round = MetricState::conformal(0.0, ScalarField::constant(s, 0.0));
  const auto us = ScalarField::constant(s, 0.7);
  CHECK(u_rhs(round, us, 2.0, 1.0, Direction::ForwardInTau).min() == doctest::Approx(4.0 - 0.7));
  CHECK(u_rhs(round, us, 2.0, 1.0, Direction::ForwardInT).max() == doctest::Approx(-4.0 - 0.7));

  const GridPtr fine = Grid::flat_torus(2, 512);
  const auto sinx = ScalarField::sample(fine, [](double x) { return std::sin(x); });
  CHECK(u_rhs(MetricState::flat(0.0, fine), sinx, 0.0, 1.0, Direction::ForwardInT)[0] ==
        doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("constant data on a static flat torus") {
  const auto flow = flat_run(16, 1.0, 1e-3);
  REQUIRE(flow.step_size() <= 1e-3);
  const auto ht = solve(flow, problem(Direction::ForwardInT, 0.0,
                                      ScalarField::constant(flow.grid_ptr(), std::exp(-1.0))));
  const double exact = std::exp(-std::exp(-1.0));
  CHECK(exact == doctest::Approx(0.69220).epsilon(1e-5));
  const double f1 = ht.f(flow.size() - 1)[3];
  CHECK(std::abs(f1 - exact) / exact <= 1e-8);
}

TEST_CASE("constant data on the shrinking sphere against the integrating-factor solution") {
  FlowConfig c;
  c.kind = FlowKind::ShrinkingSphere;
  c.grid = Grid::round_sphere(2, 16);
  c.t_end = 0.3;
  c.max_dt = 1e-3;
  const auto flow = build_trajectory(c);
  const double u0 = 0.4;
  const auto ht = solve(flow, problem(Direction::ForwardInT, 1.0,
                                      ScalarField::constant(flow.grid_ptr(), std::exp(-u0))));
  // u' = -R(t) - u with R = 2/(1-2t): u(t) = e^{-t}(u0 - int_0^t e^s R(s) ds).
  for (std::size_t k : {flow.size() / 3, flow.size() - 1}) {
    const double t = flow.time(k);
    const double integral = oracle::simpson([](double s) { return std::exp(s) * 2.0 / (1.0 - 2.0 * s); },
                                            0.0, t, 4000);
    const double exact = std::exp(-t) * (u0 - integral);
    CHECK(std::abs(ht.u(k)[5] - exact) <= 1e-8 * std::abs(exact));
  }
}

TEST_CASE("self-refinement on the flat torus") {
  const double T = 0.5;
  auto final_u = [&](std::size_t N) {
    const auto flow = flat_run(N, T);
    const auto ht = solve(flow, problem(Direction::ForwardInT, 0.0, sine_data(flow.grid_ptr())));
    return ht.u(flow.size() - 1);
  };
  const ScalarField u1 = final_u(32), u2 = final_u(64), u4 = final_u(128);
  const ScalarField ref_on_64 = restrict_to(u4, u2.grid_ptr());
  const ScalarField ref_on_32 = restrict_to(ref_on_64, u1.grid_ptr());
  const double e1 = (u1 - ref_on_32).max_abs();
  const double e2 = (u2 - ref_on_64).max_abs();
  CHECK(oracle::order(e1, e2) >= 1.9);
}

TEST_CASE("tau replay on a static metric is exact") {
  const auto flow = flat_run(64, 0.5);
  const ScalarField f0 = sine_data(flow.grid_ptr());
  const auto fwd = solve(flow, problem(Direction::ForwardInT, 0.0, f0));
  const auto bwd = solve(flow, problem(Direction::ForwardInTau, 0.0, f0));
  const std::size_t K = flow.steps();
  bool equal = true;
  for (std::size_t k = 0; k <= K; ++k) {
    const ScalarField& a = fwd.u(k);
    const ScalarField& b = bwd.u(K - k);
    for (std::size_t j = 0; j < a.size(); ++j) equal = equal && a[j] == b[j];
  }
  CHECK(equal);
  CHECK(bwd.index_in_clock_order(0) == K);
  CHECK(bwd.tau(0) == doctest::Approx(0.5));
}

TEST_CASE("backward solves read the metric in reverse") {
  FlowConfig c;
  c.kind = FlowKind::ShrinkingSphere;
  c.grid = Grid::round_sphere(2, 16);
  c.t_end = 0.3;
  c.max_dt = 1e-3;
  const auto flow = build_trajectory(c);
  const double uT = 0.2;
  const auto ht = solve(flow, problem(Direction::ForwardInTau, 2.0,
                                      ScalarField::constant(flow.grid_ptr(), std::exp(-uT))));
  // du/dtau = 2R - u with R = 2/(1 - 2(T - tau)).
  const double T = 0.3;
  const double exact = oracle::ode(
      [T](double tau, double u) { return 4.0 / (1.0 - 2.0 * (T - tau)) - u; }, uT, 0.0, T);
  CHECK(std::abs(ht.u(0)[7] - exact) <= 1e-8 * std::abs(exact));
}

TEST_CASE("solve errors") {
  const auto flow = flat_run(32, 0.1);
  auto bad = ScalarField::constant(flow.grid_ptr(), 0.5);
  bad[3] = 0.0;
  CHECK_THROWS_WITH_AS(solve(flow, problem(Direction::ForwardInT, 0.0, bad)),
                       doctest::Contains("strictly positive"), Error);
  auto tight = problem(Direction::ForwardInT, 0.0, ScalarField::constant(flow.grid_ptr(), 0.5));
  tight.sigma = 0.01;
  try {
    solve(flow, tight);
    FAIL("expected a stability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Stability);
  }
}

TEST_CASE("positivity is preserved without potential") {
  SUBCASE("constant data") {
    const auto flow = flat_run(32, 1.0, 1e-3);
    const auto ht = solve(flow, problem(Direction::ForwardInT, 0.0,
                                        ScalarField::constant(flow.grid_ptr(), 0.5)));
    const auto rep = positivity_report(ht);
    CHECK(rep.min_f == doctest::Approx(0.5));
    CHECK(rep.max_f == doctest::Approx(std::exp(-std::log(2.0) * std::exp(-1.0))).epsilon(1e-9));
    CHECK(rep.holds());
  }
  SUBCASE("sine data, both clocks") {
    const auto flow = flat_run(64, 1.0);
    for (Direction d : {Direction::ForwardInT, Direction::ForwardInTau}) {
      const ScalarField f0 = sine_data(flow.grid_ptr());
      const auto ht = solve(flow, problem(d, 0.0, f0));
      const auto rep = positivity_report(ht);
      CHECK(rep.holds());
      CHECK(rep.inf_initial == doctest::Approx(f0.min()));
      // -ln sup f0 e^{-t} <= u <= -ln inf f0 e^{-t}
      for (std::size_t i = 0; i < ht.size(); i += 50) {
        const std::size_t k = ht.index_in_clock_order(i);
        const double s = d == Direction::ForwardInT ? ht.time(k) : ht.tau(k);
        CHECK(ht.u(k).min() >= -std::log(f0.max()) * std::exp(-s) - 1e-8);
        CHECK(ht.u(k).max() <= -std::log(f0.min()) * std::exp(-s) + 1e-8);
      }
    }
  }
  SUBCASE("data close to 1 on the shrinking sphere") {
    FlowConfig c;
    c.kind = FlowKind::ShrinkingSphere;
    c.grid = Grid::round_sphere(2, 64);
    c.t_end = 0.3;
    const auto flow = build_trajectory(c);
    const ScalarField f0 = ScalarField::sample(
        flow.grid_ptr(), [](double x) { return 0.6 + 0.39 * std::cos(x) * std::cos(x); });
    CHECK(f0.max() == doctest::Approx(0.99).epsilon(1e-3));
    const auto rep = positivity_report(solve(flow, problem(Direction::ForwardInT, 0.0, f0)));
    CHECK(rep.max_f < 1.0);
    CHECK(rep.holds());
  }
}
