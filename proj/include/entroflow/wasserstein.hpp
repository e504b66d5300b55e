#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "entroflow/pde_flows.hpp"
#include "entroflow/quantile.hpp"

namespace entroflow {

/// Quadratic Wasserstein distance between line densities, computed as the L²
/// distance of their quantile functions on M uniform quantile nodes (the
/// monotone rearrangement is the optimal coupling on the line).
double w2_1d(const GridDensity& mu, const GridDensity& nu, std::size_t quantile_nodes);

/// Same as w2_1d for quantile functions already in hand.
double w2_quantiles(const QuantileRep& a, const QuantileRep& b);

/// W2 between the radial profiles of two radial densities: the 1D transport
/// of the pushforward of |x| (weight ω_n r^{n-1}). A representative of the
/// n-dimensional problem for radial data, not full n-D transport.
double w2_radial_profile(const GridDensity& mu, const GridDensity& nu, std::size_t quantile_nodes);

/// Monge cost ∫ |x − T(x)|² dμ of the monotone map T = X_ν ∘ F_μ, evaluated
/// on μ's grid. An independent route to w2_1d².
double monge_cost(const GridDensity& mu, const GridDensity& nu, std::size_t quantile_nodes);

/// Squared cost of the monotone (sorted) matching between two equal-weight
/// atomic measures with the same number of atoms.
double monotone_coupling_cost(std::vector<double> a, std::vector<double> b);

struct VelocityField {
  TangentField field;
  std::size_t flagged_nodes;  ///< nodes below the floor where mass was moving
};

/// ∇Φ solving ∂_t μ + ∂_x(μ ∇Φ) = 0 between two snapshots: −∂_t F / μ at the
/// midpoint time, with F the cumulative distribution. Nodes where the
/// midpoint density is below `floor` get zero velocity.
VelocityField continuity_velocity(const GridDensity& before, const GridDensity& after, double dt,
                                  double floor = 1e-12);

/// ⟨∇Φ, ∇Ψ⟩_μ = ∫ ∇Φ·∇Ψ dμ.
double otto_inner(const GridDensity& mu, const TangentField& phi, const TangentField& psi);

/// McCann interpolant at s ∈ [0, 1]: the density with quantile
/// (1 − s) X_μ + s X_ν, realised as the pushforward of μ.
GridDensity mccann_geodesic(const GridDensity& mu, const GridDensity& nu, double s,
                            std::size_t quantile_nodes);

/// Snapshots of the McCann geodesic at s = k/steps, k = 0..steps.
DensityTrajectory mccann_path(const GridDensity& mu, const GridDensity& nu, std::size_t steps,
                              std::size_t quantile_nodes);

/// Benamou-Brenier action Σ_k ∫ |v_k|² dμ_{k+½} Δt of a path sampled on [0, 1].
double path_action(const DensityTrajectory& path);

/// Max over interior times and bulk nodes (cumulative mass in
/// [bulk, 1 − bulk]) of |∂_sΦ + ½|∇Φ|² − κ(s)|, where Φ is rebuilt from the
/// continuity velocity with zero spatial mean and κ(s) is the μ-weighted mean
/// of the residual, which absorbs the time-dependent gauge constant.
double geodesic_hj_residual(const DensityTrajectory& path, double bulk = 1e-3);

/// Potential Φ with Φ' = field and zero spatial mean.
std::vector<double> integrate_potential(const TangentField& field);

/// CSV `s,x,value` of geodesic snapshots.
void write_geodesic_csv(std::ostream& out, const DensityTrajectory& path);

}  // namespace entroflow
