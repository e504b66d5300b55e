#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "entroflow/grid.hpp"

namespace entroflow {

enum class FunctionalKind { boltzmann_entropy, fp_free_energy, fd_free_energy, lp_norm };

const char* to_string(FunctionalKind kind);

/// Free-energy functional on densities together with its claimed Otto
/// convexity constant.
///
///   boltzmann_entropy   ∫ μ log μ                                 ρ = 0
///   fp_free_energy      ∫ μ log μ + |x|²/2 μ                      ρ = 1
///   fd_free_energy(n)   ∫ -μ^{1-1/n} + (n-1)/n |x|²/2 μ           ρ = (n-1)/n
///   lp_norm(p)          (∫ μ^p)^{1/p}                             no ρ
class FreeEnergyFunctional {
 public:
  static FreeEnergyFunctional boltzmann_entropy();
  static FreeEnergyFunctional fp_free_energy();
  static FreeEnergyFunctional fd_free_energy(int n);
  static FreeEnergyFunctional lp_norm(double p);

  FunctionalKind kind() const { return kind_; }
  std::optional<double> rho() const { return rho_; }
  /// Ambient dimension for fd_free_energy, exponent for lp_norm.
  double parameter() const { return parameter_; }
  std::string name() const;

  /// Attaches a known minimiser (γ for fp, μ∞ for fd). Must have unit mass.
  FreeEnergyFunctional with_minimizer(GridDensity minimizer) const;
  const std::optional<GridDensity>& minimizer() const { return minimizer_; }

 private:
  FreeEnergyFunctional(FunctionalKind kind, std::optional<double> rho, double parameter)
      : kind_(kind), rho_(rho), parameter_(parameter) {}

  FunctionalKind kind_;
  std::optional<double> rho_;
  double parameter_;
  std::optional<GridDensity> minimizer_;
};

double value(const FreeEnergyFunctional& f, const GridDensity& mu);

/// Otto gradient grad_μ F as a field on the grid: ∇ of the first variation.
TangentField otto_gradient(const FreeEnergyFunctional& f, const GridDensity& mu);

/// |grad_μ F|²_μ = ∫ |otto_gradient|² dμ. Fisher information for the entropy.
double production(const FreeEnergyFunctional& f, const GridDensity& mu);

/// Hess_μ F(∇Φ, ∇Φ) for a scalar potential Φ sampled on the grid.
double otto_hessian_quadform(const FreeEnergyFunctional& f, const GridDensity& mu,
                             std::span<const double> phi);

/// ∫ |∇Φ|² dμ, the Otto norm of ∇Φ.
double otto_norm_squared(const GridDensity& mu, std::span<const double> phi);

struct IdentitySides {
  double lhs;  ///< ∫ (½Δ|∇Φ|² − ∇Φ·∇ΔΦ) μ
  double rhs;  ///< ∫ ‖Hess Φ‖² μ
};

/// Evaluates both sides of the flat-space Bochner identity independently.
IdentitySides hessian_identity_check(const GridDensity& mu, std::span<const double> phi);

/// Standard Gaussian (line) or the radial profile of the standard Gaussian in
/// R^n, normalised on the grid.
GridDensity standard_gaussian(const Grid& grid);

/// Line Gaussian N(mean, sigma²) normalised on the grid.
GridDensity gaussian(const Grid& grid, double mean, double sigma);

}  // namespace entroflow
