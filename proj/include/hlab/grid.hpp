#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace hlab {

/// The three closed manifolds the lab can discretize. All data is
/// rotationally symmetric (sphere) or depends on one periodic coordinate
/// (torus), so every grid is one-dimensional.
enum class BackgroundKind {
  RotSymSphere,  // S^2 with a conformal factor, meridian coordinate theta
  FlatTorus,     // flat n-torus, data along one periodic coordinate
  RoundSphere,   // round S^n, meridian coordinate theta
};

std::string_view to_string(BackgroundKind kind);
BackgroundKind background_from_string(std::string_view name);

/**
 * Spatial discretization of the background.
 *
 * Spheres use the staggered meridian grid theta_j = (j + 1/2) h, h = pi/N,
 * which never contains a pole; ghost values across both poles are even
 * reflections. Tori use x_j = j h, h = 2 pi / N, with periodic wrap.
 */
class Grid {
 public:
  static std::shared_ptr<const Grid> rot_sym_sphere(std::size_t num_points);
  static std::shared_ptr<const Grid> round_sphere(int dimension, std::size_t num_points);
  static std::shared_ptr<const Grid> flat_torus(int dimension, std::size_t num_points);
  static std::shared_ptr<const Grid> make(BackgroundKind kind, int dimension,
                                          std::size_t num_points);

  BackgroundKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  std::size_t size() const { return nodes_.size(); }
  double spacing() const { return spacing_; }
  bool periodic() const { return kind_ == BackgroundKind::FlatTorus; }
  bool is_sphere() const { return !periodic(); }

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t j) const { return nodes_[j]; }

  /// cot(theta_j) on spheres, 0 on tori.
  std::span<const double> cot() const { return cot_; }

  /// Coordinate range: (0, pi) for spheres, [0, 2 pi) for tori.
  double period() const;

  /// Same kind, dimension and resolution.
  bool same_layout(const Grid& other) const;

 private:
  Grid(BackgroundKind kind, int dimension, std::size_t num_points);

  BackgroundKind kind_;
  int dimension_;
  double spacing_;
  std::vector<double> nodes_;
  std::vector<double> cot_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A real function on the grid nodes.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);
  static ScalarField sample(GridPtr grid, const std::function<double(double)>& fn);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;

  /// Pointwise transform.
  ScalarField map(const std::function<double(double)>& fn) const;

  ScalarField& operator+=(const ScalarField& rhs);
  ScalarField& operator-=(const ScalarField& rhs);
  ScalarField& operator*=(const ScalarField& rhs);
  ScalarField& operator+=(double rhs);
  ScalarField& operator-=(double rhs);
  ScalarField& operator*=(double rhs);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws ErrorKind::Dimension when the two fields live on different grids.
void require_same_grid(const Grid& a, const Grid& b, std::string_view context);

ScalarField operator+(ScalarField lhs, const ScalarField& rhs);
ScalarField operator-(ScalarField lhs, const ScalarField& rhs);
ScalarField operator*(ScalarField lhs, const ScalarField& rhs);
ScalarField operator+(ScalarField lhs, double rhs);
ScalarField operator-(ScalarField lhs, double rhs);
ScalarField operator*(ScalarField lhs, double rhs);
ScalarField operator*(double lhs, ScalarField rhs);
ScalarField operator-(ScalarField field);

}  // namespace hlab
