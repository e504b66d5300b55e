#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "entroflow/grid.hpp"
#include "entroflow/inequalities.hpp"

namespace entroflow {

/// A named scalar test function, bounded by 1 in absolute value on the
/// interval it was drawn for.
struct TestFunction {
  std::string label;
  std::function<double(double)> f;
};

/// Seeded bank cycling through five families on [lo, hi] (L = (hi − lo)/2):
///
///   affine     (x − c)/(2L)
///   quadratic  ((x − c)/(2L))²
///   sine       sin(kπx/L + φ),  k ∈ {1, 2, 4, 8}
///   cosine     cos(kπx/L + φ)
///   bump       exp(1 − 1/(1 − s²)) for |s| < 1, s = (x − c)/w
///
/// with c, φ, w drawn from Rng(seed) in that order.
std::vector<TestFunction> test_function_bank(std::uint64_t seed, std::size_t count, double lo, double hi);

/// Even radial functions of r on [0, R]: r²/R², cos(kπr/R), centred bumps
/// exp(−r²/w²) and r⁴/R⁴, smooth through the origin.
std::vector<TestFunction> radial_test_function_bank(std::uint64_t seed, std::size_t count, double radius);

enum class InequalityKind { lsi, sobolev, eep_fp, eep_fd, zugmeyer };

const char* to_string(InequalityKind kind);
InequalityKind inequality_kind_from_string(const std::string& s);

struct FunctionBank {
  Grid grid;
  std::vector<std::vector<double>> samples;
};

/// Positive functions on [−10, 10] (2001 nodes): alternately exp(aφ) and
/// 1 + bφ with φ from test_function_bank.
FunctionBank lsi_bank(std::uint64_t seed, std::size_t count);

/// Densities on [−10, 10] (2001 nodes): Gaussian tilts γ e^{aφ}, two-component
/// Gaussian mixtures and translated Gaussians, each normalised.
FunctionBank eep_fp_bank(std::uint64_t seed, std::size_t count);

/// Radial densities in R^3 on [0, 10] (1001 nodes): tilts of μ∞, dilations
/// of μ∞ and mixtures of μ∞ with a Gaussian profile, each normalised.
FunctionBank eep_fd_bank(std::uint64_t seed, std::size_t count);

/// Radial functions in R^3 on [0, 200] (20000 nodes): Gaussian sums and
/// cosine-modulated Gaussians with widths in [0.5, 20].
FunctionBank sobolev_bank(std::uint64_t seed, std::size_t count);

/// H = x log x on Ω = [0, 1] (201 nodes), v = exp(−4(x − ½)²), C = 8.
ZugmeyerProblem default_zugmeyer_problem(double C = 8.0);

/// Perturbations u = v(1 + εφ)/normaliser of the default problem's v, half
/// smooth (|ε| ≤ 0.5) and half strongly localised bumps of half-width 0.02 to
/// 0.05, at least eight nodes across the support.
FunctionBank zugmeyer_bank(const ZugmeyerProblem& p, std::uint64_t seed, std::size_t count);

/// Runs a checker over its bank and returns one row per case.
std::vector<InequalityCase> run_inequality_bank(InequalityKind kind, std::uint64_t seed, std::size_t count);

}  // namespace entroflow
