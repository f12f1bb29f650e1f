#include "hlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hlab/errors.hpp"

namespace hlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Config: return "config";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Ordering: return "ordering";
    case ErrorKind::SearchFailure: return "search-failure";
  }
  return "unknown";
}

std::string_view to_string(BackgroundKind kind) {
  switch (kind) {
    case BackgroundKind::RotSymSphere: return "RotSymSphere";
    case BackgroundKind::FlatTorus: return "FlatTorus";
    case BackgroundKind::RoundSphere: return "RoundSphere";
  }
  return "unknown";
}

BackgroundKind background_from_string(std::string_view name) {
  if (name == "RotSymSphere") return BackgroundKind::RotSymSphere;
  if (name == "FlatTorus") return BackgroundKind::FlatTorus;
  if (name == "RoundSphere") return BackgroundKind::RoundSphere;
  fail(ErrorKind::Config, "unknown background kind '" + std::string(name) + "'");
}

Grid::Grid(BackgroundKind kind, int dimension, std::size_t num_points)
    : kind_(kind), dimension_(dimension) {
  if (num_points < 4) fail(ErrorKind::Domain, "grid needs at least 4 points");
  if (dimension < 1) fail(ErrorKind::Domain, "manifold dimension must be >= 1");
  if (kind == BackgroundKind::RotSymSphere && dimension != 2)
    fail(ErrorKind::Domain, "conformal sphere background is two-dimensional");
  if (kind == BackgroundKind::RoundSphere && dimension < 2)
    fail(ErrorKind::Domain, "round sphere needs dimension >= 2");

  const auto n = static_cast<double>(num_points);
  nodes_.resize(num_points);
  cot_.assign(num_points, 0.0);
  if (kind == BackgroundKind::FlatTorus) {
    spacing_ = 2.0 * std::numbers::pi / n;
    for (std::size_t j = 0; j < num_points; ++j) nodes_[j] = static_cast<double>(j) * spacing_;
  } else {
    spacing_ = std::numbers::pi / n;
    for (std::size_t j = 0; j < num_points; ++j) {
      nodes_[j] = (static_cast<double>(j) + 0.5) * spacing_;
      cot_[j] = std::cos(nodes_[j]) / std::sin(nodes_[j]);
    }
  }
}

std::shared_ptr<const Grid> Grid::rot_sym_sphere(std::size_t num_points) {
  return std::shared_ptr<const Grid>(new Grid(BackgroundKind::RotSymSphere, 2, num_points));
}

std::shared_ptr<const Grid> Grid::round_sphere(int dimension, std::size_t num_points) {
  return std::shared_ptr<const Grid>(new Grid(BackgroundKind::RoundSphere, dimension, num_points));
}

std::shared_ptr<const Grid> Grid::flat_torus(int dimension, std::size_t num_points) {
  return std::shared_ptr<const Grid>(new Grid(BackgroundKind::FlatTorus, dimension, num_points));
}

std::shared_ptr<const Grid> Grid::make(BackgroundKind kind, int dimension,
                                       std::size_t num_points) {
  return std::shared_ptr<const Grid>(new Grid(kind, dimension, num_points));
}

double Grid::period() const {
  return periodic() ? 2.0 * std::numbers::pi : std::numbers::pi;
}

bool Grid::same_layout(const Grid& other) const {
  return kind_ == other.kind_ && dimension_ == other.dimension_ && size() == other.size();
}

void require_same_grid(const Grid& a, const Grid& b, std::string_view context) {
  if (&a == &b || a.same_layout(b)) return;
  fail(ErrorKind::Dimension, std::string(context) + ": fields live on different grids (" +
                                 std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                 " nodes)");
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorKind::Dimension, "scalar field without a grid");
  if (values_.size() != grid_->size())
    fail(ErrorKind::Dimension, "scalar field has " + std::to_string(values_.size()) +
                                   " values for a grid of " + std::to_string(grid_->size()));
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const auto n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(grid->node(j));
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
  ScalarField out = *this;
  for (double& v : out.values_) v = fn(v);
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& rhs) {
  require_same_grid(*grid_, rhs.grid(), "field addition");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += rhs.values_[j];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& rhs) {
  require_same_grid(*grid_, rhs.grid(), "field subtraction");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= rhs.values_[j];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& rhs) {
  require_same_grid(*grid_, rhs.grid(), "field product");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= rhs.values_[j];
  return *this;
}

ScalarField& ScalarField::operator+=(double rhs) {
  for (double& v : values_) v += rhs;
  return *this;
}

ScalarField& ScalarField::operator-=(double rhs) {
  for (double& v : values_) v -= rhs;
  return *this;
}

ScalarField& ScalarField::operator*=(double rhs) {
  for (double& v : values_) v *= rhs;
  return *this;
}

ScalarField operator+(ScalarField lhs, const ScalarField& rhs) { return lhs += rhs; }
ScalarField operator-(ScalarField lhs, const ScalarField& rhs) { return lhs -= rhs; }
ScalarField operator*(ScalarField lhs, const ScalarField& rhs) { return lhs *= rhs; }
ScalarField operator+(ScalarField lhs, double rhs) { return lhs += rhs; }
ScalarField operator-(ScalarField lhs, double rhs) { return lhs -= rhs; }
ScalarField operator*(ScalarField lhs, double rhs) { return lhs *= rhs; }
ScalarField operator*(double lhs, ScalarField rhs) { return rhs *= lhs; }
ScalarField operator-(ScalarField field) { return field *= -1.0; }

}  // namespace hlab
