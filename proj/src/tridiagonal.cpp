#include "entroflow/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

#include "entroflow/grid.hpp"

namespace entroflow {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0)
    throw std::invalid_argument("solve_tridiagonal: size mismatch");
  std::vector<double> c(n);
  std::vector<double> d(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw SolverError("solve_tridiagonal: zero pivot");
  c[0] = upper[0] / pivot;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("solve_tridiagonal: zero pivot");
    c[i] = upper[i] / pivot;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace entroflow
