#pragma once

#include <variant>

#include "hlab/grid.hpp"

namespace hlab {

/// g = e^{2 phi} g_round on S^2 (unit radius, base curvature 2).
struct ConformalForm {
  ScalarField phi;
};

/// g = c g_round on S^n, c > 0.
struct ScaledForm {
  double c;
};

/// Flat torus metric; R and Ric vanish identically.
struct FlatForm {};

using MetricForm = std::variant<ConformalForm, ScaledForm, FlatForm>;

/**
 * Metric degrees of freedom at one instant plus the cached scalar curvature.
 * Immutable after construction.
 */
class MetricState {
 public:
  static MetricState conformal(double time, ScalarField phi);
  static MetricState scaled(double time, GridPtr grid, double c);
  static MetricState flat(double time, GridPtr grid);

  double time() const { return time_; }
  const MetricForm& form() const { return form_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dimension() const { return grid_->dimension(); }

  bool is_conformal() const { return std::holds_alternative<ConformalForm>(form_); }
  bool is_scaled() const { return std::holds_alternative<ScaledForm>(form_); }
  bool is_flat() const { return std::holds_alternative<FlatForm>(form_); }

  /// Throws ErrorKind::Unsupported on the wrong form.
  const ScalarField& phi() const;
  double scale() const;

  const ScalarField& scalar_curvature() const { return curvature_; }

  /// Pointwise factor s with g = s * (background reference metric):
  /// e^{2 phi}, c, or 1.
  ScalarField metric_factor() const;
  /// Reciprocal of metric_factor(); multiplies every second-order operator.
  ScalarField inverse_metric_factor() const;
  /// Smallest value of metric_factor(); sets the parabolic step limit.
  double min_metric_factor() const;

 private:
  MetricState(double time, MetricForm form, GridPtr grid);

  double time_;
  MetricForm form_;
  GridPtr grid_;
  ScalarField curvature_;
};

}  // namespace hlab
