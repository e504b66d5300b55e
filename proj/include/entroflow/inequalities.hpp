#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entroflow/grid.hpp"

namespace entroflow {

/// Tolerance used by every checker: 1e-6 · max(1, |rhs|).
double inequality_tolerance(double rhs);

struct LsiResult {
  double lhs;    ///< ∫ f log(f / ∫f dγ) dγ
  double rhs;    ///< ½ ∫ |∇f|²/f dγ
  double ratio;  ///< lhs/rhs, or 0 when rhs vanishes
  bool pass;
};

/// Gaussian log-Sobolev inequality for a positive function on a line grid.
/// γ is the standard Gaussian normalised on the grid.
LsiResult lsi_check(const Grid& grid, std::span<const double> f);

struct SobolevResult {
  double lhs_norm;  ///< ‖f‖ in L^{2n/(n−2)}
  double rhs_norm;  ///< ‖∇f‖ in L²
  double ratio_to_optimal;
  bool pass;
};

/// Optimal Sobolev constant C_op(n), taken as the Sobolev ratio of the
/// extremal (1 + r²)^{−(n−2)/2} on the ball of radius R sampled with
/// `resolution` nodes. Results are cached per (n, R, resolution).
double sobolev_constant(int n, double radius, std::size_t resolution);

/// Node count sobolev_check uses for the constant on a grid of `nodes` nodes.
std::size_t sobolev_oracle_resolution(std::size_t nodes);

/// The extremal (1 + |x|²)^{−(n−2)/2} scaled by λ, sampled on the grid.
std::vector<double> sobolev_extremal(const Grid& grid, int n, double lambda = 1.0);

/// Both Sobolev norms of a radial function and their ratio over C_op(n) on
/// the same ball. Rejects f whose boundary value exceeds
/// boundary_tolerance · max|f|.
SobolevResult sobolev_check(const Grid& grid, std::span<const double> f, int n,
                            double boundary_tolerance = 1e-8);

struct EepResult {
  double lhs;  ///< F(μ) − F(μ_min)
  double rhs;  ///< |grad F|²_μ / (2ρ)
  bool equality;
  bool pass;
};

/// F(μ) − F(γ) ≤ ½ |grad F|²_μ for the Fokker-Planck free energy on a line grid.
EepResult eep_check_fp(const GridDensity& mu);

/// F(μ) − F(μ∞) ≤ (n−1)/(2n) ∫ |∇(μ^{−1/n} − r²/2)|² μ for the fast-diffusion
/// free energy on a radial grid of dimension n.
EepResult eep_check_fd(const GridDensity& mu, int n);

/// Raised when a Zugmeyer problem or input fails a hypothesis.
class HypothesisViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ZugmeyerProblem {
  std::function<double(double)> H;
  std::function<double(double)> Psi;  ///< H′
  int n = 1;
  Grid omega;
  std::vector<double> v;
  double C = 1.0;

  double U(double x) const { return x * Psi(x) - H(x); }
};

/// H(x) = x log x with H(0) = 0 and Ψ = 1 + log x.
ZugmeyerProblem entropy_zugmeyer_problem(Grid omega, std::vector<double> v, double C, int n = 1);

struct HypothesisReport {
  double h_at_zero;
  double min_h_second;    ///< smallest sampled H″
  double hyp1_worst;      ///< smallest x U′(x) + (1−n)/n U(x)
  double hyp1_worst_x;
  double hyp2_worst;      ///< smallest −eigenvalue of Hess Ψ(v) minus C
  std::size_t hyp2_worst_node;
  bool ok() const;
  std::string describe() const;
};

/// Samples the hypotheses on a log-spaced positive grid up to `upper`
/// (H, U) and on Ω (Ψ(v)).
HypothesisReport check_hypotheses(const ZugmeyerProblem& p, double upper);

struct ZugmeyerResult {
  double lhs;  ///< ∫ H(u) − H(v) − (u − v) Ψ(v)
  double rhs;  ///< 1/(2C) ∫ |∇(Ψ(v) − Ψ(u))|² u
  HypothesisReport hypotheses;
  bool pass;
};

/// Throws HypothesisViolation with a diagnostic when a hypothesis fails,
/// std::invalid_argument when ∫u ≠ ∫v.
ZugmeyerResult zugmeyer_check(const ZugmeyerProblem& p, std::span<const double> u);

struct InequalityCase {
  std::size_t case_id;
  double lhs;
  double rhs;
  double margin;  ///< rhs − lhs; for Sobolev rhs is C_op ‖∇f‖
  bool pass;
};

/// CSV `case_id,lhs,rhs,margin,pass`.
void write_inequality_csv(std::ostream& out, const std::vector<InequalityCase>& cases);

}  // namespace entroflow
