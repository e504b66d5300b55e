#pragma once

#include <span>
#include <vector>

namespace entroflow {

/// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are
/// ignored. Intended for diagonally dominant or SPD systems; throws
/// SolverError on a zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace entroflow
