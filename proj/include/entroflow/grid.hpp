#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace entroflow {

/// Thrown when a solver or iterative routine fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Geometry { line, radial };

const char* to_string(Geometry g);

/// Surface area of the unit sphere S^{n-1} in R^n (2 for n = 1, 2π, 4π, ...).
double sphere_area(int n);

/// Uniform 1D grid. In radial geometry the nodes are radii and every
/// integral carries the factor ω_n r^{n-1}.
///
/// Grid is a cheap handle: copies share the immutable node storage.
class Grid {
 public:
  Grid(double a, double b, std::size_t count, int dim, Geometry geometry);

  std::size_t size() const { return data_->nodes.size(); }
  double spacing() const { return data_->spacing; }
  int dim() const { return data_->dim; }
  Geometry geometry() const { return data_->geometry; }
  bool radial() const { return data_->geometry == Geometry::radial; }
  double lower() const { return data_->nodes.front(); }
  double upper() const { return data_->nodes.back(); }

  std::span<const double> nodes() const { return data_->nodes; }
  double operator[](std::size_t i) const { return data_->nodes[i]; }

  /// Trapezoid weights, including the radial measure factor.
  std::span<const double> weights() const { return data_->weights; }

  /// Measure of the sphere of radius r (1 on the line).
  double area_factor(double r) const;

  bool same_as(const Grid& other) const;

 private:
  struct Data {
    std::vector<double> nodes;
    std::vector<double> weights;
    double spacing = 0.0;
    int dim = 1;
    Geometry geometry = Geometry::line;
  };
  std::shared_ptr<const Data> data_;
};

Grid make_uniform_grid(double a, double b, std::size_t count, int dim, Geometry geometry);

/// Radial grid on [0, R] with cells of width R/count and nodes at the cell
/// centres, so the first node sits at spacing/2 and no node touches r = 0.
Grid make_staggered_radial_grid(double radius, std::size_t count, int dim);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Trapezoid quadrature of grid samples against the grid measure.
double integrate(std::span<const double> samples, const Grid& grid);

/// First derivative: central differences inside, second-order one-sided at
/// both ends.
std::vector<double> gradient_fd(std::span<const double> samples, const Grid& grid);

/// Second derivative with the same accuracy policy as gradient_fd. Needs four
/// samples for the one-sided end stencils.
std::vector<double> second_derivative_fd(std::span<const double> samples, const Grid& grid);

/// Floor applied inside logarithms and negative powers only.
inline constexpr double kLogFloor = 1e-300;

double safe_log(double v);

/// Probability density sampled on a grid. Values are nonnegative; the cached
/// mass is the trapezoid integral of the values.
class GridDensity {
 public:
  GridDensity(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double mass() const { return mass_; }
  double min_value() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  double mass_;
};

/// Rescales nonnegative samples to unit mass. Rejects negative entries and
/// zero total mass.
GridDensity normalize(std::vector<double> samples, const Grid& grid);

/// Samples of a gradient field ∇Φ (Φ' in line or radial coordinates).
struct TangentField {
  Grid grid;
  std::vector<double> values;

  TangentField(Grid g, std::vector<double> v);
};

/// L¹ distance between two densities on the same grid.
double l1_distance(const GridDensity& a, const GridDensity& b);

/// Moments against the grid measure.
double mean(const GridDensity& mu);
double variance(const GridDensity& mu);

}  // namespace entroflow
