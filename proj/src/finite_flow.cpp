#include "entroflow/finite_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "entroflow/csv.hpp"
#include "entroflow/grid.hpp"
#include "entroflow/random.hpp"

namespace entroflow {

PotentialSpec quadratic_potential(int dim) {
  PotentialSpec p;
  p.name = "quadratic";
  p.dim = dim;
  p.energy = [](const Point& x) { return 0.5 * x.squaredNorm(); };
  p.gradient = [](const Point& x) { return Point(x); };
  p.hessian = [dim](const Point&) { return Eigen::MatrixXd::Identity(dim, dim).eval(); };
  p.rho = 1.0;
  p.minimizer = Point::Zero(dim);
  return p;
}

PotentialSpec quartic_potential() {
  PotentialSpec p;
  p.name = "quartic";
  p.dim = 1;
  p.energy = [](const Point& x) {
    const double v = x[0];
    return 0.5 * v * v + 0.25 * v * v * v * v;
  };
  p.gradient = [](const Point& x) {
    const double v = x[0];
    Point g(1);
    g[0] = v + v * v * v;
    return g;
  };
  p.hessian = [](const Point& x) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0 + 3.0 * x[0] * x[0];
    return h;
  };
  p.rho = 1.0;
  p.minimizer = Point::Zero(1);
  return p;
}

PotentialSpec anisotropic_quadratic(const std::vector<double>& diagonal) {
  if (diagonal.empty()) throw std::invalid_argument("anisotropic_quadratic: empty diagonal");
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(diagonal.data(), static_cast<Eigen::Index>(diagonal.size()));
  if (a.minCoeff() <= 0.0) throw std::invalid_argument("anisotropic_quadratic: entries must be > 0");
  PotentialSpec p;
  p.name = "anisotropic_quadratic";
  p.dim = static_cast<int>(a.size());
  p.energy = [a](const Point& x) { return 0.5 * x.dot(a.cwiseProduct(x)); };
  p.gradient = [a](const Point& x) { return Point(a.cwiseProduct(x)); };
  p.hessian = [a](const Point&) { return Eigen::MatrixXd(a.asDiagonal()); };
  p.rho = a.minCoeff();
  p.minimizer = Point::Zero(a.size());
  return p;
}

std::vector<PotentialSpec> potential_bank() {
  return {quadratic_potential(2), quartic_potential(), anisotropic_quadratic({0.5, 2.0})};
}

ConsistencyReport check_potential(const PotentialSpec& p, double lo, double hi, unsigned long long seed,
                                  int samples) {
  Rng rng(seed);
  ConsistencyReport rep{std::numeric_limits<double>::infinity(), 0.0, true, true};
  for (int s = 0; s < samples; ++s) {
    Point x(p.dim);
    for (int k = 0; k < p.dim; ++k) x[k] = rng.uniform(lo, hi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.hessian(x), Eigen::EigenvaluesOnly);
    rep.min_hessian_eigenvalue = std::min(rep.min_hessian_eigenvalue, eig.eigenvalues().minCoeff());

    const Point g = p.gradient(x);
    Point fd(p.dim);
    for (int k = 0; k < p.dim; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
      Point xp = x;
      Point xm = x;
      xp[k] += h;
      xm[k] -= h;
      fd[k] = (p.energy(xp) - p.energy(xm)) / (2.0 * h);
    }
    const double err = (fd - g).norm() / std::max(1.0, g.norm());
    rep.max_gradient_error = std::max(rep.max_gradient_error, err);
  }
  rep.convex_ok = rep.min_hessian_eigenvalue >= p.rho - 1e-9;
  rep.gradient_ok = rep.max_gradient_error <= 1e-5;
  return rep;
}

PointTrajectory integrate_flow(const PotentialSpec& p, const Point& x0, double dt, double horizon) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_flow: dt must be > 0");
  if (!(horizon >= dt)) throw std::invalid_argument("integrate_flow: T must be >= dt");
  if (x0.size() != p.dim) throw std::invalid_argument("integrate_flow: start point has wrong dimension");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  PointTrajectory traj;
  traj.solver = "rk4";
  traj.step = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  Point x = x0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Point k1 = -p.gradient(x);
    const Point k2 = -p.gradient(x + 0.5 * dt * k1);
    const Point k3 = -p.gradient(x + 0.5 * dt * k2);
    const Point k4 = -p.gradient(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(x.norm() <= 1e12)) throw SolverError("integrate_flow: state diverged (potential not coercive?)");
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

double de_bruijn_residual(const PotentialSpec& p, const PointTrajectory& traj) {
  if (traj.size() < 3) throw std::invalid_argument("de_bruijn_residual: need at least 3 time points");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double dedt = (p.energy(traj.states[k + 1]) - p.energy(traj.states[k - 1])) /
                        (traj.times[k + 1] - traj.times[k - 1]);
    const double prod = p.gradient(traj.states[k]).squaredNorm();
    worst = std::max(worst, std::abs(dedt + prod));
  }
  return worst;
}

RatioCheck production_decay_check(const PotentialSpec& p, const PointTrajectory& traj, double tol) {
  const double g0 = p.gradient(traj.states.front()).squaredNorm();
  if (g0 <= 1e-300) return {0.0, true, true};
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double bound = std::exp(-2.0 * p.rho * traj.times[k]) * g0;
    worst = std::max(worst, p.gradient(traj.states[k]).squaredNorm() / bound);
  }
  return {worst, false, worst <= 1.0 + tol};
}

Point locate_minimizer(const PotentialSpec& p, const Point& start) {
  if (p.minimizer) return *p.minimizer;
  const double horizon = 20.0 / p.rho;
  const double dt = std::min(1e-2, horizon / 100.0);
  Point x = integrate_flow(p, start, dt, horizon).states.back();
  for (int it = 0; it < 50; ++it) {
    const Point g = p.gradient(x);
    if (g.norm() <= 1e-10) return x;
    x -= p.hessian(x).ldlt().solve(g);
  }
  if (p.gradient(x).norm() <= 1e-10) return x;
  throw SolverError("locate_minimizer: no critical point found (coercivity violated?)");
}

RatioCheck entropy_decay_check(const PotentialSpec& p, const PointTrajectory& traj, double tol) {
  const Point beta = locate_minimizer(p, traj.states.front());
  const double e_beta = p.energy(beta);
  const double gap0 = p.energy(traj.states.front()) - e_beta;
  if (gap0 <= 1e-300) return {0.0, true, true};
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double bound = std::exp(-2.0 * p.rho * traj.times[k]) * gap0;
    worst = std::max(worst, (p.energy(traj.states[k]) - e_beta) / bound);
  }
  return {worst, false, worst <= 1.0 + tol};
}

EepSides eep_inequality_check(const PotentialSpec& p, const Point& x, double tol) {
  const Point beta = locate_minimizer(p, x);
  const double lhs = p.energy(x) - p.energy(beta);
  const double rhs = p.gradient(x).squaredNorm() / (2.0 * p.rho);
  return {lhs, rhs, lhs <= rhs + tol * std::max(1.0, std::abs(rhs))};
}

double max_energy_increase(const PotentialSpec& p, const PointTrajectory& traj) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < traj.size(); ++k)
    worst = std::max(worst, p.energy(traj.states[k]) - p.energy(traj.states[k - 1]));
  return worst;
}

void write_trajectory_csv(std::ostream& out, const PotentialSpec& p, const PointTrajectory& traj) {
  std::vector<std::string> header{"t"};
  for (int k = 1; k <= p.dim; ++k) header.push_back("x_" + std::to_string(k));
  header.push_back("E");
  header.push_back("gradnorm2");
  CsvWriter csv(out, header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    csv.cell(traj.times[k]);
    for (int i = 0; i < p.dim; ++i) csv.cell(traj.states[k][i]);
    csv.cell(p.energy(traj.states[k])).cell(p.gradient(traj.states[k]).squaredNorm());
    csv.end_row();
  }
}

}  // namespace entroflow
