#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"

using namespace hlab;
using std::numbers::pi;

namespace {

double max_error(const ScalarField& a, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    e = std::max(e, std::abs(a[j] - exact(a.grid().node(j))));
  return e;
}

MetricState conformal(std::size_t N, const std::function<double(double)>& phi) {
  const GridPtr g = Grid::rot_sym_sphere(N);
  return MetricState::conformal(0.0, ScalarField::sample(g, phi));
}

// R for g = e^{2 phi} g_round from the surface-of-revolution formula.
double curvature_oracle(const std::function<long double(long double)>& phi, double theta) {
  auto E = [&](long double t) { return std::exp(2 * phi(t)); };
  auto G = [&](long double t) { return std::exp(2 * phi(t)) * std::sin(t) * std::sin(t); };
  return oracle::revolution_scalar_curvature(E, G, theta);
}

}  // namespace

TEST_CASE("grid layout") {
  const GridPtr s = Grid::rot_sym_sphere(8);
  CHECK(s->spacing() == doctest::Approx(pi / 8));
  CHECK(s->node(0) == doctest::Approx(pi / 16));
  CHECK(s->node(7) == doctest::Approx(pi - pi / 16));
  const GridPtr t = Grid::flat_torus(3, 8);
  CHECK(t->node(0) == 0.0);
  CHECK(t->node(4) == doctest::Approx(pi));
  CHECK(t->dimension() == 3);
  CHECK_THROWS_AS(Grid::rot_sym_sphere(2), Error);
}

TEST_CASE("laplacian examples") {
  SUBCASE("round S^2, cos theta is an eigenfunction with eigenvalue -2") {
    double prev = 0.0;
    for (std::size_t N : {32, 64, 128, 256}) {
      const auto m = conformal(N, [](double) { return 0.0; });
      const auto u = ScalarField::sample(m.grid_ptr(), [](double x) { return std::cos(x); });
      const double err = max_error(laplacian(m, u), [](double x) { return -2.0 * std::cos(x); });
      const double h = m.grid().spacing();
      CHECK(err <= 1.0 * h * h);
      if (N > 32) CHECK(oracle::order(prev, err) >= 1.9);
      prev = err;
    }
  }
  SUBCASE("round S^n eigenvalue -n") {
    for (int n : {3, 4}) {
      const GridPtr g = Grid::round_sphere(n, 256);
      const auto m = MetricState::scaled(0.0, g, 1.0);
      const auto u = ScalarField::sample(g, [](double x) { return std::cos(x); });
      CHECK(max_error(laplacian(m, u), [n](double x) { return -n * std::cos(x); }) < 1e-3);
    }
  }
  SUBCASE("flat torus Fourier mode") {
    double prev = 0.0;
    for (std::size_t N : {32, 64, 128}) {
      const GridPtr g = Grid::flat_torus(2, N);
      const auto m = MetricState::flat(0.0, g);
      const auto u = ScalarField::sample(g, [](double x) { return std::sin(x); });
      const double err = max_error(laplacian(m, u), [](double x) { return -std::sin(x); });
      if (N > 32) CHECK(oracle::order(prev, err) >= 1.9);
      prev = err;
    }
  }
  SUBCASE("constant conformal factor scales by e^{-2 phi}") {
    const auto m = conformal(128, [](double) { return 0.3; });
    const auto u = ScalarField::sample(m.grid_ptr(), [](double x) { return std::cos(x); });
    CHECK(max_error(laplacian(m, u), [](double x) { return -2.0 * std::exp(-0.6) * std::cos(x); }) <
          1e-3);
  }
  SUBCASE("conformal covariance is exact") {
    const auto m = conformal(64, [](double x) { return 0.2 * std::cos(x) - 0.1 * std::cos(2 * x); });
    const auto round = conformal(64, [](double) { return 0.0; });
    const auto u = ScalarField::sample(m.grid_ptr(), [](double x) { return std::exp(std::cos(x)); });
    const ScalarField expected = m.metric_factor().map([](double s) { return 1.0 / s; }) *
                                 laplacian(round, u);
    CHECK((laplacian(m, u) - expected).max_abs() <= 1e-13);
  }
}

TEST_CASE("scalar curvature") {
  CHECK(conformal(32, [](double) { return 0.0; }).scalar_curvature().max() == doctest::Approx(2.0));
  CHECK(conformal(32, [](double) { return 0.0; }).scalar_curvature().min() == doctest::Approx(2.0));
  const auto s = MetricState::scaled(0.0, Grid::round_sphere(3, 16), 0.6);
  CHECK(s.scalar_curvature().max() == doctest::Approx(10.0));
  CHECK(MetricState::flat(0.0, Grid::flat_torus(2, 16)).scalar_curvature().max_abs() == 0.0);

  // phi = 0.1 cos theta: the oracle reproduces the quoted value at theta = pi/3.
  auto phi = [](long double t) { return 0.1L * std::cos(t); };
  CHECK(curvature_oracle(phi, pi / 3) == doctest::Approx(1.9906).epsilon(1e-4));

  double prev = 0.0;
  for (std::size_t N : {32, 64, 128}) {
    const auto m = conformal(N, [](double x) { return 0.1 * std::cos(x); });
    const double err =
        max_error(m.scalar_curvature(), [&](double x) { return curvature_oracle(phi, x); });
    if (N > 32) CHECK(oracle::order(prev, err) >= 1.9);
    prev = err;
  }
}

TEST_CASE("gradient and hessian examples") {
  const GridPtr t = Grid::flat_torus(2, 256);
  const auto flat = MetricState::flat(0.0, t);
  const auto s = ScalarField::sample(t, [](double x) { return std::sin(x); });
  CHECK(grad_norm_sq(flat, s)[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(hessian_norm_sq(flat, s)[64] == doctest::Approx(1.0).epsilon(1e-3));  // x = pi/2

  // Scaled n=2, c=4, u=cos theta: 0.25 sin^2 at the equator (average of the two middle nodes).
  const GridPtr g = Grid::round_sphere(2, 256);
  const auto big = MetricState::scaled(0.0, g, 4.0);
  const auto c = ScalarField::sample(g, [](double x) { return std::cos(x); });
  const auto gn = grad_norm_sq(big, c);
  CHECK(0.5 * (gn[127] + gn[128]) == doctest::Approx(0.25).epsilon(1e-3));

  // Round S^2: Hess cos = -cos g, so |Hess|^2 = 2 cos^2.
  const auto round = MetricState::scaled(0.0, g, 1.0);
  CHECK(max_error(hessian_norm_sq(round, c), [](double x) { return 2 * std::cos(x) * std::cos(x); }) <
        1e-3);

  SUBCASE("constants are annihilated") {
    const auto m = conformal(64, [](double x) { return 0.2 * std::cos(x); });
    const auto k = ScalarField::constant(m.grid_ptr(), 3.7);
    CHECK(laplacian(m, k).max_abs() == 0.0);
    CHECK(grad_norm_sq(m, k).max_abs() == 0.0);
    CHECK(hessian_norm_sq(m, k).max_abs() == 0.0);
  }
}

TEST_CASE("ricci norms") {
  CHECK(ricci_norm_sq(conformal(16, [](double) { return 0.0; })).max() == doctest::Approx(2.0));
  CHECK(ricci_norm_sq(MetricState::flat(0.0, Grid::flat_torus(2, 16))).max_abs() == 0.0);
  CHECK(ricci_norm_sq(MetricState::scaled(0.0, Grid::round_sphere(3, 16), 0.5)).max() ==
        doctest::Approx(48.0));
}

TEST_CASE("integration and Gauss-Bonnet") {
  const auto round = conformal(256, [](double) { return 0.0; });
  const auto one = ScalarField::constant(round.grid_ptr(), 1.0);
  CHECK(integrate(round, one) == doctest::Approx(4 * pi).epsilon(1e-4));
  CHECK(integrate(round, round.scalar_curvature()) == doctest::Approx(8 * pi).epsilon(1e-4));

  // Volume of the round S^3 is 2 pi^2.
  const auto s3 = MetricState::scaled(0.0, Grid::round_sphere(3, 256), 1.0);
  CHECK(integrate(s3, ScalarField::constant(s3.grid_ptr(), 1.0)) ==
        doctest::Approx(2 * pi * pi).epsilon(1e-4));
  // Flat 3-torus volume (2 pi)^3.
  const auto t3 = MetricState::flat(0.0, Grid::flat_torus(3, 64));
  CHECK(integrate(t3, ScalarField::constant(t3.grid_ptr(), 1.0)) ==
        doctest::Approx(8 * pi * pi * pi));

  for (auto phi : std::vector<std::function<double(double)>>{
           [](double x) { return 0.1 * std::cos(x); },
           [](double x) { return 0.3 * std::cos(2 * x); },
           [](double x) { return 0.2 * std::cos(x) + 0.15 * std::cos(3 * x) - 0.1; }}) {
    double prev = 0.0;
    for (std::size_t N : {64, 128, 256}) {
      const auto m = conformal(N, phi);
      const double err = std::abs(integrate(m, m.scalar_curvature()) - 8 * pi);
      const double h = m.grid().spacing();
      CHECK(err <= 10.0 * h * h);
      if (N > 64 && prev > 1e-12) CHECK(oracle::order(prev, err) >= 1.9);
      prev = err;
    }
  }
}

TEST_CASE("surface Bochner identity converges") {
  auto residual = [](std::size_t N) {
    const auto m = conformal(N, [](double x) { return 0.15 * std::cos(x); });
    const auto u = ScalarField::sample(m.grid_ptr(), [](double x) { return std::cos(x) + 0.3 * std::cos(2 * x); });
    const ScalarField g = grad_norm_sq(m, u);
    const ScalarField r = laplacian(m, g) - 2.0 * hessian_norm_sq(m, u) -
                          2.0 * grad_dot(m, laplacian(m, u), u) - m.scalar_curvature() * g;
    return r.max_abs();
  };
  const double e1 = residual(64), e2 = residual(128), e3 = residual(256);
  CHECK(oracle::order(e1, e2) >= 1.0);
  CHECK(oracle::order(e2, e3) >= 1.0);
  CHECK(e3 < 1e-2);
}

TEST_CASE("trace inequality for the shifted Hessian") {
  const auto m = conformal(128, [](double x) { return 0.1 * std::cos(x); });
  const auto u = ScalarField::sample(m.grid_ptr(), [](double x) { return std::sin(x) * std::sin(x) + 0.2 * std::cos(x); });
  const auto& r = m.scalar_curvature();
  const ScalarField lap = laplacian(m, u);
  for (double eps : {0.0, 0.25, 0.5, 1.0}) {
    const ScalarField lhs = hessian_norm_sq(m, u) - eps * r * lap + (0.5 * eps * eps) * (r * r);
    const ScalarField d = lap - eps * r;
    const ScalarField rhs = 0.5 * d * d;
    CHECK((lhs - rhs).min() >= -1e-12);
  }
  // The radial and tangential eigenvalues trace to the Laplacian.
  const auto hd = hessian_diagonal(m, u);
  CHECK((hd.radial + hd.tangential - lap).max_abs() <= 1e-12);
}

TEST_CASE("meridian path energy") {
  const GridPtr t = Grid::flat_torus(2, 64);
  auto flat_at = [&](double s) { return MetricState::flat(s, t); };
  CHECK(meridian_path_energy(flat_at, 1.0, 0.0, 1.0, 1.0, 10) == 0.0);
  CHECK(meridian_path_energy(flat_at, 0.0, 0.0, pi, 1.0, 10) == doctest::Approx(pi * pi));

  const GridPtr g = Grid::round_sphere(2, 64);
  auto shrinking = [&](double s) { return MetricState::scaled(s, g, 1.0 - 2.0 * s); };
  CHECK(meridian_path_energy(shrinking, 0.5, 0.0, 1.0, 0.25, 8) == doctest::Approx(0.75));
  CHECK_THROWS_AS(meridian_path_energy(shrinking, 0.5, 0.25, 1.0, 0.25, 8), Error);
}
