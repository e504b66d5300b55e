#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "entroflow/functionals.hpp"
#include "entroflow/pde_flows.hpp"
#include "entroflow/quantile.hpp"

namespace entroflow {

struct JkoConfig {
  double tau = 0.02;
  std::size_t K = 50;
  std::size_t M = 1000;    ///< quantile nodes
  double tol = 1e-12;      ///< on the Newton decrement
  int max_iter = 100;
  void validate() const;
};

/// Minimiser of F(X) + W2²(X, X_k)/(2τ) over monotone quantile functions,
/// where for the two supported functionals
///
///   F(X) = −Σ_j dq log(M ΔX_j) + Σ_j dq V(X_j),  V = 0 or |x|²/2.
///
/// Solved by Newton on the tridiagonal Hessian with a backtracking line
/// search that keeps every increment above 1e-12; a pool-adjacent-violators
/// projection repairs monotonicity when the line search cannot.
struct JkoInnerResult {
  QuantileRep X;
  int iterations;
  double objective_start;  ///< objective at X_k (the stay-put candidate)
  double objective_end;
};

JkoInnerResult jko_quantile_step(const FreeEnergyFunctional& f, const QuantileRep& xk, const JkoConfig& cfg);

/// F in quantile coordinates, as minimised by the scheme.
double quantile_free_energy(const FreeEnergyFunctional& f, const QuantileRep& x);

/// One minimizing-movement step on a grid density. The result is μ_k pushed
/// forward by the monotone map X_k → X_{k+1}.
GridDensity jko_step(const FreeEnergyFunctional& f, const GridDensity& mu, const JkoConfig& cfg);

struct JkoLogRow {
  std::size_t k;
  double F;        ///< quantile free energy after step k
  double w2_step;  ///< W2(μ_k, μ_{k−1}); 0 for k = 0
  int inner_iters;
};

struct JkoRun {
  DensityTrajectory trajectory;  ///< K + 1 states at times kτ
  std::vector<QuantileRep> quantiles;
  std::vector<JkoLogRow> log;
  std::size_t energy_increases;       ///< steps with F_{k+1} > F_k + 1e-9
  std::size_t step_control_failures;  ///< steps with W2² > 2τ(F_k − F_{k+1}) + 1e-9
};

/// K steps of the scheme. The quantile function is carried across steps and
/// each state is μ0 pushed forward by X_0 → X_k, so the grid transfer does
/// not accumulate error.
JkoRun jko_trajectory(const FreeEnergyFunctional& f, const GridDensity& mu0, const JkoConfig& cfg);

struct PdeComparison {
  std::vector<double> times;
  std::vector<double> l1_gaps;
  double max_gap;
};

/// L¹ gap between each JKO state and the matching PDE solution (heat for the
/// entropy, Fokker-Planck for the free energy) at equal times. The PDE step
/// must divide τ.
PdeComparison compare_with_pde(const FreeEnergyFunctional& f, const JkoRun& run, double tau, double pde_dt);

/// Isotonic (nondecreasing) least-squares fit with equal weights.
std::vector<double> pool_adjacent_violators(std::span<const double> y);

/// CSV `k,F,W2_step,inner_iters`.
void write_jko_log_csv(std::ostream& out, const JkoRun& run);

}  // namespace entroflow
