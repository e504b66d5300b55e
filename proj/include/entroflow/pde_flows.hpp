#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "entroflow/finite_flow.hpp"
#include "entroflow/functionals.hpp"
#include "entroflow/grid.hpp"

namespace entroflow {

enum class FlowKind { heat, fokker_planck, fast_diffusion };

const char* to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& s);

struct FlowSpec {
  FlowKind kind = FlowKind::heat;
  Grid grid;
  double dt = 1e-3;
  double horizon = 1.0;  ///< final time T
  int n = 3;             ///< ambient dimension of the fast-diffusion flow
  std::size_t snapshot_every = 1;
  int newton_max_iterations = 60;
  double newton_tolerance = 1e-13;
};

using DensityTrajectory = Trajectory<GridDensity>;

struct SolveStats {
  double max_mass_drift = 0.0;     ///< max |mass(μ_t) − mass(μ_0)| over all steps
  double max_boundary_flux = 0.0;  ///< max per-step mass change rate across the boundary
  std::size_t newton_iterations = 0;
  std::size_t steps = 0;
};

struct FlowRun {
  DensityTrajectory trajectory;
  SolveStats stats;
};

/// Implicit finite-volume solve on the grid's trapezoid control volumes with
/// no-flux boundaries.
///
/// Heat and Fokker-Planck use exponentially fitted (Scharfetter-Gummel) face
/// fluxes, so the sampled equilibrium e^{-V} is an exact discrete steady
/// state; each step is one tridiagonal solve. Fast diffusion writes the flux
/// as (n-1)/n μ ∇(−μ^{-1/n} + r²/2) with the face mobility lagged and the
/// potential implicit, solved by damped Newton. Snapshots are kept every
/// snapshot_every steps plus the final state.
FlowRun solve_with_stats(const FlowSpec& spec, const GridDensity& mu0);
DensityTrajectory solve(const FlowSpec& spec, const GridDensity& mu0);

struct FdStationary {
  GridDensity density;
  double C;
  double tail_mass;  ///< mass of (C + r²/2)^{-n} outside the truncated domain
  bool truncation_ok;
};

/// μ∞ = (C + r²/2)^{-n} with C fixed by bisection so the grid mass is 1.
FdStationary stationary_fd(int n, const Grid& grid);

/// The free energy matching a flow: Boltzmann entropy for heat, the
/// Fokker-Planck free energy with the discrete Gaussian as minimiser, and the
/// fast-diffusion free energy with μ∞ as minimiser.
FreeEnergyFunctional lyapunov_functional(FlowKind kind, const Grid& grid, int n = 3);

struct DeBruijnRow {
  double t;
  double entropy_rate;  ///< centred difference of Ent(μ_t)
  double fisher;        ///< ∫ |∇μ_t|²/μ_t
};

struct DeBruijnCheck {
  std::vector<DeBruijnRow> rows;
  double max_residual;
};

/// Compares d/dt Ent(μ_t) with −∫|∇μ_t|²/μ_t at interior snapshots whose time
/// lies in [t_begin, t_end].
DeBruijnCheck de_bruijn_pde_check(const DensityTrajectory& traj, double t_begin = 0.0,
                                  double t_end = std::numeric_limits<double>::infinity());

struct DissipationRow {
  double t;
  double value;
  double production;
  double bound;  ///< e^{-2ρt} production(0)
};

struct DissipationReport {
  std::vector<DissipationRow> rows;
  double rho;
  double minimum_value;       ///< F at the minimiser (or the last value when none is attached)
  double production_rate;     ///< −slope of log production vs t
  double value_rate;          ///< −slope of log(F − F_min) vs t
  double max_bound_ratio;     ///< max production / bound
  double max_value_increase;  ///< largest F(μ_{k+1}) − F(μ_k)
  bool bound_ok;
  bool rate_ok;
  bool monotone_ok;
  bool pass() const { return bound_ok && rate_ok && monotone_ok; }
};

struct DissipationOptions {
  double bound_tolerance = 1e-2;  ///< production <= bound (1 + tol)
  double rate_tolerance = 0.05;   ///< fitted rate >= 2ρ (1 − tol)
  double monotone_tolerance = 1e-10;
  double fit_floor = 1e-9;  ///< fit only rows with quantity > floor · quantity(0)
  double fit_from = 0.0;    ///< and with t >= fit_from
};

DissipationReport dissipation_report(const DensityTrajectory& traj, const FreeEnergyFunctional& f,
                                     const DissipationOptions& options = {});

/// Least-squares decay rate −d/dt log(y) over the given samples.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y);

/// Largest per-snapshot increase of a functional along a trajectory.
double max_value_increase(const DensityTrajectory& traj, const FreeEnergyFunctional& f);

/// CSV `t,value,production,bound`.
void write_report_csv(std::ostream& out, const DissipationReport& report);

/// Long-format snapshot series `t,x,value` (`t,r,value` on radial grids).
void write_snapshots_csv(std::ostream& out, const DensityTrajectory& traj);

}  // namespace entroflow
