#pragma once

#include <functional>

#include "hlab/grid.hpp"
#include "hlab/metric.hpp"

namespace hlab {

// Second-order central differences. Sphere grids reflect evenly across the
// poles, torus grids wrap periodically.
ScalarField first_derivative(const ScalarField& u);
ScalarField second_derivative(const ScalarField& u);

/// Laplacian of the reference metric: u'' + (n-1) cot(theta) u' on spheres,
/// u'' on tori.
ScalarField reference_laplacian(const ScalarField& u);

/// Laplace-Beltrami operator of m. Every form is realized as
/// inverse_metric_factor() * reference_laplacian(u), which makes
/// conformal covariance exact.
ScalarField laplacian(const MetricState& m, const ScalarField& u);

ScalarField scalar_curvature(const MetricState& m);

/// |grad u|^2.
ScalarField grad_norm_sq(const MetricState& m, const ScalarField& u);

/// <grad a, grad b>, formed as inverse_metric_factor() * a' b'.
ScalarField grad_dot(const MetricState& m, const ScalarField& a, const ScalarField& b);

/// Eigenvalues of the Hessian of a symmetric function in an orthonormal
/// frame: one radial value and a tangential value of multiplicity n-1.
struct HessianDiagonal {
  ScalarField radial;
  ScalarField tangential;
  int tangential_multiplicity;
};

HessianDiagonal hessian_diagonal(const MetricState& m, const ScalarField& u);

/// |Hess u|^2.
ScalarField hessian_norm_sq(const MetricState& m, const ScalarField& u);

/// rho with Ric = rho g. Every supported background is Einstein at each point
/// (R/2 on surfaces, (n-1)/c on scaled spheres, 0 when flat).
ScalarField ricci_eigenvalue(const MetricState& m);

/// |Rc|^2 = n rho^2.
ScalarField ricci_norm_sq(const MetricState& m);

/// Riemannian volume integral. Midpoint rule in the meridian/periodic
/// coordinate.
double integrate(const MetricState& m, const ScalarField& u);

/// Linear interpolation at coordinate x; reflects across poles, wraps on tori.
double interpolate(const ScalarField& u, double x);

/// Metric factor (e^{2 phi}, c or 1) at coordinate x.
double metric_factor_at(const MetricState& m, double x);

/**
 * Energy of the constant-speed coordinate path x1 -> x2 over [t1, t2],
 * integral of weight(t) |gamma'(t)|^2_{g(t)} dt, with the metric at each
 * sample time supplied by metric_at. Composite Simpson on num_samples
 * intervals (bumped to the next even number).
 */
double meridian_path_energy(const std::function<MetricState(double)>& metric_at, double x1,
                            double t1, double x2, double t2, int num_samples,
                            const std::function<double(double)>& weight = {});

/// Composite Simpson weights for num_intervals (even) equal intervals.
double simpson_weight(int index, int num_intervals);

}  // namespace hlab
