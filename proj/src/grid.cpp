#include "entroflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace entroflow {

const char* to_string(Geometry g) {
  return g == Geometry::line ? "line" : "radial";
}

double sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

Grid::Grid(double a, double b, std::size_t count, int dim, Geometry geometry) {
  if (!(a < b)) throw std::invalid_argument("grid: require a < b");
  if (count < 8) throw std::invalid_argument("grid: require at least 8 nodes");
  if (dim < 1) throw std::invalid_argument("grid: ambient dimension must be >= 1");
  if (geometry == Geometry::line && dim != 1)
    throw std::invalid_argument("grid: line geometry is one-dimensional");
  if (geometry == Geometry::radial && a < 0.0)
    throw std::invalid_argument("grid: radial geometry requires a >= 0");

  auto data = std::make_shared<Data>();
  data->dim = dim;
  data->geometry = geometry;
  data->spacing = (b - a) / static_cast<double>(count - 1);
  data->nodes.resize(count);
  for (std::size_t i = 0; i < count; ++i) data->nodes[i] = a + data->spacing * static_cast<double>(i);
  data->nodes.back() = b;

  const double omega = geometry == Geometry::radial ? sphere_area(dim) : 1.0;
  data->weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double w = data->spacing;
    if (i == 0 || i + 1 == count) w *= 0.5;
    if (geometry == Geometry::radial) w *= omega * std::pow(data->nodes[i], dim - 1);
    data->weights[i] = w;
  }
  data_ = std::move(data);
}

double Grid::area_factor(double r) const {
  if (!radial()) return 1.0;
  return sphere_area(dim()) * std::pow(r, dim() - 1);
}

bool Grid::same_as(const Grid& other) const {
  if (data_ == other.data_) return true;
  return size() == other.size() && dim() == other.dim() && geometry() == other.geometry() &&
         lower() == other.lower() && upper() == other.upper();
}

Grid make_uniform_grid(double a, double b, std::size_t count, int dim, Geometry geometry) {
  return Grid(a, b, count, dim, geometry);
}

Grid make_staggered_radial_grid(double radius, std::size_t count, int dim) {
  if (!(radius > 0.0)) throw std::invalid_argument("staggered radial grid: radius must be > 0");
  if (count < 8) throw std::invalid_argument("grid: require at least 8 nodes");
  const double h = radius / static_cast<double>(count);
  return Grid(0.5 * h, radius - 0.5 * h, count, dim, Geometry::radial);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double integrate(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("integrate: sample count " + std::to_string(samples.size()) +
                                " does not match grid size " + std::to_string(grid.size()));
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * samples[i];
  return sum;
}

std::vector<double> gradient_fd(std::span<const double> f, const Grid& grid) {
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("gradient_fd: need at least 3 samples");
  if (n != grid.size()) throw std::invalid_argument("gradient_fd: length mismatch");
  const double h = grid.spacing();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> second_derivative_fd(std::span<const double> f, const Grid& grid) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("second_derivative_fd: need at least 4 samples");
  if (n != grid.size()) throw std::invalid_argument("second_derivative_fd: length mismatch");
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

double safe_log(double v) { return std::log(std::max(v, kLogFloor)); }

GridDensity::GridDensity(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)), mass_(0.0) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("density: length mismatch");
  for (double v : values_) {
    if (!(v >= 0.0)) throw std::invalid_argument("density: values must be nonnegative and finite");
  }
  mass_ = integrate(values_, grid_);
}

double GridDensity::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

GridDensity normalize(std::vector<double> samples, const Grid& grid) {
  for (double v : samples) {
    if (!(v >= 0.0)) throw std::invalid_argument("normalize: negative or non-finite sample");
  }
  const double mass = integrate(samples, grid);
  if (!(mass > 0.0)) throw std::invalid_argument("normalize: zero mass");
  for (double& v : samples) v /= mass;
  return GridDensity(grid, std::move(samples));
}

TangentField::TangentField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("tangent field: length mismatch");
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  require_same_grid(a.grid(), b.grid(), "l1_distance");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a[i] - b[i]);
  return integrate(diff, a.grid());
}

double mean(const GridDensity& mu) {
  const auto x = mu.grid().nodes();
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = x[i] * mu[i];
  return integrate(s, mu.grid()) / mu.mass();
}

double variance(const GridDensity& mu) {
  const double m = mean(mu);
  const auto x = mu.grid().nodes();
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (x[i] - m) * (x[i] - m) * mu[i];
  return integrate(s, mu.grid()) / mu.mass();
}

}  // namespace entroflow
