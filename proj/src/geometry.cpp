#include "hlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hlab/errors.hpp"

namespace hlab {

namespace {

// Neighbour values with the ghost rule of the grid.
struct Stencil {
  double left;
  double right;
};

Stencil neighbours(const Grid& grid, std::span<const double> u, std::size_t j) {
  const std::size_t n = u.size();
  if (grid.periodic()) {
    return {u[(j + n - 1) % n], u[(j + 1) % n]};
  }
  return {j == 0 ? u[0] : u[j - 1], j + 1 == n ? u[n - 1] : u[j + 1]};
}

// Everything except the curvature cache, so the ctor can use it.
ScalarField inverse_factor(const MetricForm& form, const GridPtr& grid) {
  if (const auto* conf = std::get_if<ConformalForm>(&form))
    return conf->phi.map([](double p) { return std::exp(-2.0 * p); });
  if (const auto* sc = std::get_if<ScaledForm>(&form))
    return ScalarField::constant(grid, 1.0 / sc->c);
  return ScalarField::constant(grid, 1.0);
}

ScalarField curvature_of(const MetricForm& form, const GridPtr& grid) {
  if (const auto* conf = std::get_if<ConformalForm>(&form)) {
    // R = e^{-2 phi} (R_0 - 2 Delta_0 phi), R_0 = 2 on the unit sphere.
    ScalarField r = reference_laplacian(conf->phi);
    for (std::size_t j = 0; j < r.size(); ++j)
      r[j] = std::exp(-2.0 * conf->phi[j]) * (2.0 - 2.0 * r[j]);
    return r;
  }
  if (const auto* sc = std::get_if<ScaledForm>(&form)) {
    const double n = grid->dimension();
    return ScalarField::constant(grid, n * (n - 1.0) / sc->c);
  }
  return ScalarField::constant(grid, 0.0);
}

}  // namespace

MetricState::MetricState(double time, MetricForm form, GridPtr grid)
    : time_(time),
      form_(std::move(form)),
      grid_(std::move(grid)),
      curvature_(curvature_of(form_, grid_)) {}

MetricState MetricState::conformal(double time, ScalarField phi) {
  if (phi.grid().kind() != BackgroundKind::RotSymSphere)
    fail(ErrorKind::Dimension, "conformal metric needs a RotSymSphere grid");
  GridPtr grid = phi.grid_ptr();
  return MetricState(time, ConformalForm{std::move(phi)}, std::move(grid));
}

MetricState MetricState::scaled(double time, GridPtr grid, double c) {
  if (grid->kind() != BackgroundKind::RoundSphere)
    fail(ErrorKind::Dimension, "scaled metric needs a RoundSphere grid");
  if (!(c > 0.0)) fail(ErrorKind::Domain, "scale factor must be positive, got " + std::to_string(c));
  return MetricState(time, ScaledForm{c}, std::move(grid));
}

MetricState MetricState::flat(double time, GridPtr grid) {
  if (grid->kind() != BackgroundKind::FlatTorus)
    fail(ErrorKind::Dimension, "flat metric needs a FlatTorus grid");
  return MetricState(time, FlatForm{}, std::move(grid));
}

const ScalarField& MetricState::phi() const {
  if (const auto* conf = std::get_if<ConformalForm>(&form_)) return conf->phi;
  fail(ErrorKind::Unsupported, "metric is not conformal");
}

double MetricState::scale() const {
  if (const auto* sc = std::get_if<ScaledForm>(&form_)) return sc->c;
  fail(ErrorKind::Unsupported, "metric is not a scaled round sphere");
}

ScalarField MetricState::metric_factor() const {
  if (const auto* conf = std::get_if<ConformalForm>(&form_))
    return conf->phi.map([](double p) { return std::exp(2.0 * p); });
  if (const auto* sc = std::get_if<ScaledForm>(&form_)) return ScalarField::constant(grid_, sc->c);
  return ScalarField::constant(grid_, 1.0);
}

ScalarField MetricState::inverse_metric_factor() const { return inverse_factor(form_, grid_); }

double MetricState::min_metric_factor() const {
  if (const auto* conf = std::get_if<ConformalForm>(&form_)) return std::exp(2.0 * conf->phi.min());
  if (const auto* sc = std::get_if<ScaledForm>(&form_)) return sc->c;
  return 1.0;
}

ScalarField first_derivative(const ScalarField& u) {
  const Grid& grid = u.grid();
  const double inv = 1.0 / (2.0 * grid.spacing());
  std::vector<double> d(u.size());
  const auto v = u.values();
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto s = neighbours(grid, v, j);
    d[j] = (s.right - s.left) * inv;
  }
  return ScalarField(u.grid_ptr(), std::move(d));
}

ScalarField second_derivative(const ScalarField& u) {
  const Grid& grid = u.grid();
  const double inv = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<double> d(u.size());
  const auto v = u.values();
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto s = neighbours(grid, v, j);
    d[j] = (s.right - 2.0 * v[j] + s.left) * inv;
  }
  return ScalarField(u.grid_ptr(), std::move(d));
}

ScalarField reference_laplacian(const ScalarField& u) {
  ScalarField out = second_derivative(u);
  const Grid& grid = u.grid();
  if (grid.periodic()) return out;
  const ScalarField du = first_derivative(u);
  const double k = grid.dimension() - 1.0;
  const auto cot = grid.cot();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += k * cot[j] * du[j];
  return out;
}

ScalarField laplacian(const MetricState& m, const ScalarField& u) {
  require_same_grid(m.grid(), u.grid(), "laplacian");
  return m.inverse_metric_factor() * reference_laplacian(u);
}

ScalarField scalar_curvature(const MetricState& m) { return m.scalar_curvature(); }

ScalarField grad_norm_sq(const MetricState& m, const ScalarField& u) {
  require_same_grid(m.grid(), u.grid(), "grad_norm_sq");
  const ScalarField du = first_derivative(u);
  return m.inverse_metric_factor() * du * du;
}

ScalarField grad_dot(const MetricState& m, const ScalarField& a, const ScalarField& b) {
  require_same_grid(m.grid(), a.grid(), "grad_dot");
  require_same_grid(m.grid(), b.grid(), "grad_dot");
  return m.inverse_metric_factor() * first_derivative(a) * first_derivative(b);
}

HessianDiagonal hessian_diagonal(const MetricState& m, const ScalarField& u) {
  require_same_grid(m.grid(), u.grid(), "hessian");
  const Grid& grid = m.grid();
  const ScalarField du = first_derivative(u);
  const ScalarField d2u = second_derivative(u);
  const ScalarField w = m.inverse_metric_factor();
  const auto cot = grid.cot();

  // In the frame e_1 = s^{-1/2} d_theta the only Christoffel correction is
  // phi' (radial) and cot + phi' (tangential).
  const ScalarField dphi =
      m.is_conformal() ? first_derivative(m.phi()) : ScalarField::constant(m.grid_ptr(), 0.0);

  ScalarField radial = d2u;
  ScalarField tangential = du;
  for (std::size_t j = 0; j < u.size(); ++j) {
    radial[j] = w[j] * (d2u[j] - dphi[j] * du[j]);
    tangential[j] = w[j] * (cot[j] + dphi[j]) * du[j];
  }
  return {std::move(radial), std::move(tangential), grid.dimension() - 1};
}

ScalarField hessian_norm_sq(const MetricState& m, const ScalarField& u) {
  const auto h = hessian_diagonal(m, u);
  return h.radial * h.radial + static_cast<double>(h.tangential_multiplicity) * h.tangential * h.tangential;
}

ScalarField ricci_eigenvalue(const MetricState& m) {
  return m.scalar_curvature() * (1.0 / m.dimension());
}

ScalarField ricci_norm_sq(const MetricState& m) {
  const ScalarField rho = ricci_eigenvalue(m);
  return static_cast<double>(m.dimension()) * rho * rho;
}

double integrate(const MetricState& m, const ScalarField& u) {
  require_same_grid(m.grid(), u.grid(), "integrate");
  const Grid& grid = m.grid();
  const int n = grid.dimension();
  const double h = grid.spacing();
  double sum = 0.0;
  if (grid.periodic()) {
    for (double v : u.values()) sum += v;
    return std::pow(2.0 * std::numbers::pi, n - 1) * h * sum;
  }
  // Area of the unit S^{n-1} times sin^{n-1}(theta) d theta.
  const double sphere_area = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  const ScalarField s = m.metric_factor();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double vol = std::pow(s[j], 0.5 * n) * std::pow(std::sin(grid.node(j)), n - 1);
    sum += u[j] * vol;
  }
  return sphere_area * h * sum;
}

double interpolate(const ScalarField& u, double x) {
  const Grid& grid = u.grid();
  const std::size_t n = u.size();
  const double h = grid.spacing();
  if (grid.periodic()) {
    const double period = grid.period();
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    const double s = y / h;
    auto j = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(j);
    j %= n;
    return (1.0 - frac) * u[j] + frac * u[(j + 1) % n];
  }
  if (x < 0.0 || x > std::numbers::pi)
    fail(ErrorKind::Domain, "meridian coordinate " + std::to_string(x) + " outside [0, pi]");
  const double s = x / h - 0.5;
  // Between a pole and the first node the even reflection makes u flat.
  if (s <= 0.0) return u[0];
  if (s >= static_cast<double>(n - 1)) return u[n - 1];
  const auto j = static_cast<std::size_t>(std::floor(s));
  const double frac = s - static_cast<double>(j);
  return (1.0 - frac) * u[j] + frac * u[j + 1];
}

double metric_factor_at(const MetricState& m, double x) {
  if (m.is_conformal()) return std::exp(2.0 * interpolate(m.phi(), x));
  if (m.is_scaled()) return m.scale();
  return 1.0;
}

double simpson_weight(int index, int num_intervals) {
  if (index == 0 || index == num_intervals) return 1.0 / 3.0;
  return (index % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

double meridian_path_energy(const std::function<MetricState(double)>& metric_at, double x1,
                            double t1, double x2, double t2, int num_samples,
                            const std::function<double(double)>& weight) {
  if (!(t2 > t1))
    fail(ErrorKind::Ordering, "path energy needs t1 < t2 (got t1=" + std::to_string(t1) +
                                  ", t2=" + std::to_string(t2) + ")");
  if (x1 == x2) return 0.0;
  int m = num_samples < 2 ? 2 : num_samples;
  if (m % 2 == 1) ++m;
  const double dt = (t2 - t1) / m;
  const double speed = (x2 - x1) / (t2 - t1);
  double sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = (i == m) ? t2 : t1 + i * dt;
    const double x = x1 + speed * (t - t1);
    const double w = weight ? weight(t) : 1.0;
    sum += simpson_weight(i, m) * w * metric_factor_at(metric_at(t), x) * speed * speed;
  }
  return sum * dt;
}

}  // namespace hlab
