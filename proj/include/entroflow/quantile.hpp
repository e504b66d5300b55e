#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entroflow/grid.hpp"

namespace entroflow {

/// Monotone quantile function sampled at the cell midpoints q_j = (j + 1/2)/M
/// of a uniform partition of (0, 1). The values x are nondecreasing.
class QuantileRep {
 public:
  explicit QuantileRep(std::vector<double> x);

  std::size_t size() const { return x_.size(); }
  double dq() const { return 1.0 / static_cast<double>(x_.size()); }
  double q(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dq(); }
  std::span<const double> values() const { return x_; }
  double operator[](std::size_t j) const { return x_[j]; }

 private:
  std::vector<double> x_;
};

/// Normalised cumulative distribution at the grid nodes (line geometry),
/// built by cumulative trapezoid so that cdf.back() == 1.
std::vector<double> cumulative_distribution(const GridDensity& mu);

/// Quantile function of a line density on M uniform quantile nodes, obtained
/// by piecewise-linear inversion of the cumulative trapezoid CDF.
QuantileRep cdf_and_quantile(const GridDensity& mu, std::size_t quantile_nodes);

/// Density recovered from a quantile function by differentiating its inverse:
/// the mass dq between consecutive quantiles spread over their gap. Tails
/// beyond the first and last quantile gaps decay exponentially with the
/// correct mass. The result is renormalised on the grid.
GridDensity density_from_quantile(const QuantileRep& quantile, const Grid& grid);

/// Push a line density forward by the monotone map sending from[j] to to[j]
/// (linear between samples, extended affinely past the ends). When from and
/// to agree the input is returned unchanged.
GridDensity pushforward_monotone(const GridDensity& mu, std::span<const double> from,
                                 std::span<const double> to);

/// Piecewise-linear interpolation over increasing abscissae, with constant
/// extension outside.
double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace entroflow
