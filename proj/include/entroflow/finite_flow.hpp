#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entroflow/grid.hpp"

namespace entroflow {

using Point = Eigen::VectorXd;

/// A ρ-convex potential E on R^n with its derivatives.
struct PotentialSpec {
  std::string name;
  int dim = 1;
  std::function<double(const Point&)> energy;
  std::function<Point(const Point&)> gradient;
  std::function<Eigen::MatrixXd(const Point&)> hessian;
  double rho = 1.0;                ///< claimed bound Hess E >= ρ Id
  std::optional<Point> minimizer;  ///< β when known
};

/// Time-stamped states of an evolution, shared by the finite-dimensional and
/// PDE flows.
template <typename State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::string solver;
  double step = 0.0;

  std::size_t size() const { return times.size(); }
};

using PointTrajectory = Trajectory<Point>;

/// E = |x|²/2 in R^n (ρ = 1, β = 0).
PotentialSpec quadratic_potential(int dim);
/// E = x²/2 + x⁴/4 on R (ρ = 1, β = 0).
PotentialSpec quartic_potential();
/// E = ½ xᵀ A x for diagonal A; ρ is the smallest eigenvalue.
PotentialSpec anisotropic_quadratic(const std::vector<double>& diagonal);
/// The three potentials above, in that order.
std::vector<PotentialSpec> potential_bank();

struct ConsistencyReport {
  double min_hessian_eigenvalue;  ///< smallest eigenvalue over the sampled box
  double max_gradient_error;      ///< relative FD error of gradient vs energy
  bool convex_ok;
  bool gradient_ok;
};

/// Spot-checks Hess E >= ρ Id and the gradient against central differences at
/// seeded random points in [lo, hi]^n.
ConsistencyReport check_potential(const PotentialSpec& p, double lo, double hi, unsigned long long seed,
                                  int samples = 64);

/// Classical RK4 for dx/dt = -∇E(x) on [0, T] with fixed step dt. Throws
/// SolverError when the state norm exceeds 1e12.
PointTrajectory integrate_flow(const PotentialSpec& p, const Point& x0, double dt, double horizon);

/// max_t |d/dt E(S_t) + |∇E(S_t)|²| with centred time differences.
double de_bruijn_residual(const PotentialSpec& p, const PointTrajectory& traj);

struct RatioCheck {
  double worst_ratio;  ///< largest observed ratio (≤ 1 + tol means pass)
  bool degenerate;     ///< start at the minimiser: ratios are 0/0
  bool pass;
};

/// |∇E(S_t)|² / (e^{-2ρt} |∇E(x0)|²) along the trajectory.
RatioCheck production_decay_check(const PotentialSpec& p, const PointTrajectory& traj, double tol = 1e-6);

/// (E(S_t) − E(β)) / (e^{-2ρt} (E(x0) − E(β))) along the trajectory.
RatioCheck entropy_decay_check(const PotentialSpec& p, const PointTrajectory& traj, double tol = 1e-6);

struct EepSides {
  double lhs;  ///< E(x) − E(β)
  double rhs;  ///< |∇E(x)|² / (2ρ)
  bool pass;
};

/// Locates β when the potential does not carry it: runs the flow to T = 20/ρ, then
/// Newton-polishes to |∇E| <= 1e-10.
Point locate_minimizer(const PotentialSpec& p, const Point& start);

EepSides eep_inequality_check(const PotentialSpec& p, const Point& x, double tol = 1e-9);

/// Largest per-step increase of E along the trajectory (≤ 0 when monotone).
double max_energy_increase(const PotentialSpec& p, const PointTrajectory& traj);

/// CSV `t,x_1..x_n,E,gradnorm2`.
void write_trajectory_csv(std::ostream& out, const PotentialSpec& p, const PointTrajectory& traj);

}  // namespace entroflow
