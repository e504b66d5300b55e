#include "entroflow/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace entroflow {

QuantileRep::QuantileRep(std::vector<double> x) : x_(std::move(x)) {
  if (x_.size() < 8) throw std::invalid_argument("quantile: need at least 8 quantile nodes");
  for (std::size_t j = 1; j < x_.size(); ++j) {
    if (!(x_[j] >= x_[j - 1]))
      throw std::invalid_argument("quantile: values must be nondecreasing (index " + std::to_string(j) + ")");
  }
}

double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double x0 = xs[k - 1];
  const double x1 = xs[k];
  if (x1 == x0) return ys[k];
  const double t = (x - x0) / (x1 - x0);
  return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

std::vector<double> cumulative_distribution(const GridDensity& mu) {
  const Grid& grid = mu.grid();
  if (grid.radial())
    throw std::invalid_argument("cdf_and_quantile: radial densities use the radial transport path");
  const double h = grid.spacing();
  std::vector<double> cdf(mu.size(), 0.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (mu[i - 1] + mu[i]);
  const double total = cdf.back();
  if (!(total > 0.0)) throw std::invalid_argument("cdf_and_quantile: zero-mass density");
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  return cdf;
}

QuantileRep cdf_and_quantile(const GridDensity& mu, std::size_t quantile_nodes) {
  if (quantile_nodes < 8) throw std::invalid_argument("cdf_and_quantile: need M >= 8");
  const auto cdf = cumulative_distribution(mu);
  const auto x = mu.grid().nodes();
  const double h = mu.grid().spacing();
  std::vector<double> out(quantile_nodes);
  const double dq = 1.0 / static_cast<double>(quantile_nodes);
  for (std::size_t j = 0; j < quantile_nodes; ++j) {
    const double q = (static_cast<double>(j) + 0.5) * dq;
    // First node with cdf >= q; the preceding node then has cdf < q.
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
    std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    if (k == 0) k = 1;
    const double c0 = cdf[k - 1];
    const double c1 = cdf[k];
    const double t = c1 > c0 ? (q - c0) / (c1 - c0) : 0.0;
    out[j] = x[k - 1] + std::clamp(t, 0.0, 1.0) * h;
  }
  for (std::size_t j = 1; j < out.size(); ++j) out[j] = std::max(out[j], out[j - 1]);
  return QuantileRep(std::move(out));
}

GridDensity density_from_quantile(const QuantileRep& quantile, const Grid& grid) {
  if (grid.radial()) throw std::invalid_argument("density_from_quantile: line grids only");
  const std::size_t m = quantile.size();
  const double dq = quantile.dq();
  std::vector<double> mid;
  std::vector<double> dens;
  mid.reserve(m - 1);
  dens.reserve(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double gap = quantile[j + 1] - quantile[j];
    if (gap <= 0.0) continue;
    mid.push_back(0.5 * (quantile[j] + quantile[j + 1]));
    dens.push_back(dq / gap);
  }
  if (mid.size() < 2) throw std::invalid_argument("density_from_quantile: degenerate quantile function");

  // Mass outside the first and last midpoints: the end half-cell plus half a gap.
  const double tail_mass = dq;
  const double rate_left = dens.front() / tail_mass;
  const double rate_right = dens.back() / tail_mass;

  std::vector<double> values(grid.size());
  const auto x = grid.nodes();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (x[i] < mid.front()) {
      values[i] = dens.front() * std::exp(rate_left * (x[i] - mid.front()));
    } else if (x[i] > mid.back()) {
      values[i] = dens.back() * std::exp(-rate_right * (x[i] - mid.back()));
    } else {
      values[i] = interpolate_linear(mid, dens, x[i]);
    }
  }
  return normalize(std::move(values), grid);
}

GridDensity pushforward_monotone(const GridDensity& mu, std::span<const double> from,
                                 std::span<const double> to) {
  const Grid& grid = mu.grid();
  if (grid.radial()) throw std::invalid_argument("pushforward_monotone: line grids only");
  if (from.size() != to.size() || from.size() < 2)
    throw std::invalid_argument("pushforward_monotone: map samples mismatch");

  // Strictly increasing support points of the map.
  std::vector<double> src;
  std::vector<double> dst;
  src.reserve(from.size());
  dst.reserve(from.size());
  for (std::size_t j = 0; j < from.size(); ++j) {
    if (!src.empty() && from[j] <= src.back()) continue;
    src.push_back(from[j]);
    dst.push_back(to[j]);
  }
  if (src.size() < 2) throw std::invalid_argument("pushforward_monotone: degenerate map");

  const auto x = grid.nodes();
  const std::size_t n = grid.size();
  // Displacement D(s) = T(s) - s, so the identity map moves nothing exactly.
  std::vector<double> disp(src.size());
  for (std::size_t j = 0; j < src.size(); ++j) disp[j] = dst[j] - src[j];
  const std::size_t last = src.size() - 1;
  const double slope_lo = (disp[1] - disp[0]) / (src[1] - src[0]);
  const double slope_hi = (disp[last] - disp[last - 1]) / (src[last] - src[last - 1]);
  auto displacement = [&](double s) {
    if (s < src.front()) return disp.front() + slope_lo * (s - src.front());
    if (s > src.back()) return disp.back() + slope_hi * (s - src.back());
    return interpolate_linear(src, disp, s);
  };

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + displacement(x[i]);
  const auto jac = gradient_fd(y, grid);
  std::vector<double> pushed(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(jac[i] > 0.0)) throw SolverError("pushforward_monotone: map is not increasing on the grid");
    pushed[i] = mu[i] / jac[i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(y[i] > y[i - 1])) throw SolverError("pushforward_monotone: transported nodes out of order");
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = interpolate_linear(y, pushed, x[i]);
  return normalize(std::move(values), grid);
}

}  // namespace entroflow
