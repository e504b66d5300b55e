#include "entroflow/jko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "entroflow/csv.hpp"
#include "entroflow/tridiagonal.hpp"
#include "entroflow/wasserstein.hpp"

namespace entroflow {

namespace {

constexpr double kIncrementFloor = 1e-12;

// Confinement potential of the functional, with its first two derivatives.
struct Potential {
  bool quadratic;
  double v(double x) const { return quadratic ? 0.5 * x * x : 0.0; }
  double dv(double x) const { return quadratic ? x : 0.0; }
  double d2v() const { return quadratic ? 1.0 : 0.0; }
};

Potential potential_of(const FreeEnergyFunctional& f) {
  switch (f.kind()) {
    case FunctionalKind::boltzmann_entropy:
      return {false};
    case FunctionalKind::fp_free_energy:
      return {true};
    default:
      throw std::invalid_argument("jko: only boltzmann_entropy and fp_free_energy are supported, got " + f.name());
  }
}

double entropy_and_potential(const Potential& pot, std::span<const double> x) {
  const double m = static_cast<double>(x.size());
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double d = x[j + 1] - x[j];
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    sum -= std::log(m * d);
  }
  for (double xj : x) sum += pot.v(xj);
  return sum / m;
}

double objective(const Potential& pot, std::span<const double> x, std::span<const double> xk, double tau) {
  double prox = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) prox += (x[j] - xk[j]) * (x[j] - xk[j]);
  return entropy_and_potential(pot, x) + prox / (2.0 * tau * static_cast<double>(x.size()));
}

bool increments_ok(std::span<const double> x) {
  for (std::size_t j = 0; j + 1 < x.size(); ++j)
    if (!(x[j + 1] - x[j] >= kIncrementFloor)) return false;
  return true;
}

}  // namespace

void JkoConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("jko: tau must be > 0");
  if (K < 1) throw std::invalid_argument("jko: K must be >= 1");
  if (M < 64) throw std::invalid_argument("jko: M must be >= 64");
  if (!(tol > 0.0)) throw std::invalid_argument("jko: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("jko: max_iter must be >= 1");
}

std::vector<double> pool_adjacent_violators(std::span<const double> y) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : y) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t n = count.back() + count[count.size() - 2];
      const double merged =
          (level.back() * static_cast<double>(count.back()) +
           level[level.size() - 2] * static_cast<double>(count[count.size() - 2])) /
          static_cast<double>(n);
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = n;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < level.size(); ++b) out.insert(out.end(), count[b], level[b]);
  return out;
}

double quantile_free_energy(const FreeEnergyFunctional& f, const QuantileRep& x) {
  return entropy_and_potential(potential_of(f), x.values());
}

JkoInnerResult jko_quantile_step(const FreeEnergyFunctional& f, const QuantileRep& xk_rep, const JkoConfig& cfg) {
  cfg.validate();
  const Potential pot = potential_of(f);
  const auto xk = xk_rep.values();
  const std::size_t m = xk.size();
  if (!increments_ok(xk)) throw std::invalid_argument("jko: previous quantile function is not strictly increasing");

  std::vector<double> x(xk.begin(), xk.end());
  const double j_start = objective(pot, x, xk, cfg.tau);
  double j_cur = j_start;

  std::vector<double> g(m), diag(m), off(m, 0.0), trial(m);
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    for (std::size_t j = 0; j < m; ++j) {
      g[j] = pot.dv(x[j]) + (x[j] - xk[j]) / cfg.tau;
      diag[j] = pot.d2v() + 1.0 / cfg.tau;
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double inv = 1.0 / (x[j + 1] - x[j]);
      g[j] += inv;
      g[j + 1] -= inv;
      diag[j] += inv * inv;
      diag[j + 1] += inv * inv;
      off[j] = -inv * inv;
    }
    // off[j] couples j and j+1: lower[j+1] = upper[j] = off[j].
    std::vector<double> lower(m, 0.0), upper(m, 0.0), rhs(m);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      upper[j] = off[j];
      lower[j + 1] = off[j];
    }
    for (std::size_t j = 0; j < m; ++j) rhs[j] = -g[j];
    const auto p = solve_tridiagonal(lower, diag, upper, rhs);

    double slope = 0.0;
    for (std::size_t j = 0; j < m; ++j) slope += g[j] * p[j];
    slope /= static_cast<double>(m);
    if (-slope <= cfg.tol) {
      converged = true;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-12) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = x[j] + t * p[j];
      if (increments_ok(trial)) {
        const double j_trial = objective(pot, trial, xk, cfg.tau);
        if (j_trial <= j_cur + 1e-4 * t * slope) {
          x.swap(trial);
          j_cur = j_trial;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (accepted) continue;

    // Line search stalled: project the full Newton point onto monotone
    // sequences and keep it only if it still lowers the objective.
    for (std::size_t j = 0; j < m; ++j) trial[j] = x[j] + p[j];
    auto repaired = pool_adjacent_violators(trial);
    for (std::size_t j = 1; j < m; ++j) repaired[j] = std::max(repaired[j], repaired[j - 1] + kIncrementFloor);
    const double j_rep = objective(pot, repaired, xk, cfg.tau);
    if (!(j_rep < j_cur)) {
      if (-slope <= 1e3 * cfg.tol) {
        converged = true;
        break;
      }
      throw SolverError("jko: monotonicity repair failed to lower the objective");
    }
    x = std::move(repaired);
    j_cur = j_rep;
  }
  if (!converged) throw SolverError("jko: inner Newton did not converge in max_iter iterations");
  if (j_cur > j_start + 1e-12 * std::max(1.0, std::abs(j_start)))
    throw SolverError("jko: proximal objective increased");
  return {QuantileRep(std::move(x)), it, j_start, j_cur};
}

GridDensity jko_step(const FreeEnergyFunctional& f, const GridDensity& mu, const JkoConfig& cfg) {
  cfg.validate();
  potential_of(f);
  if (mu.grid().radial()) throw std::invalid_argument("jko: line densities only");
  if (std::abs(mu.mass() - 1.0) > 1e-8) throw std::invalid_argument("jko: density must have mass 1");
  if (!(mu.min_value() > 0.0)) throw std::invalid_argument("jko: density must be positive");
  const auto xk = cdf_and_quantile(mu, cfg.M);
  const auto next = jko_quantile_step(f, xk, cfg);
  return pushforward_monotone(mu, xk.values(), next.X.values());
}

JkoRun jko_trajectory(const FreeEnergyFunctional& f, const GridDensity& mu0, const JkoConfig& cfg) {
  cfg.validate();
  potential_of(f);
  if (mu0.grid().radial()) throw std::invalid_argument("jko: line densities only");
  if (std::abs(mu0.mass() - 1.0) > 1e-8) throw std::invalid_argument("jko: density must have mass 1");
  if (!(mu0.min_value() > 0.0)) throw std::invalid_argument("jko: density must be positive");

  JkoRun run;
  run.trajectory.solver = "jko";
  run.trajectory.step = cfg.tau;
  run.energy_increases = 0;
  run.step_control_failures = 0;

  const auto x0 = cdf_and_quantile(mu0, cfg.M);
  run.quantiles.push_back(x0);
  run.trajectory.times.push_back(0.0);
  run.trajectory.states.push_back(mu0);
  double f_prev = quantile_free_energy(f, x0);
  run.log.push_back({0, f_prev, 0.0, 0});

  for (std::size_t k = 1; k <= cfg.K; ++k) {
    auto res = jko_quantile_step(f, run.quantiles.back(), cfg);
    const double f_next = quantile_free_energy(f, res.X);
    const double w2 = w2_quantiles(run.quantiles.back(), res.X);
    if (f_next > f_prev + 1e-9) ++run.energy_increases;
    if (w2 * w2 > 2.0 * cfg.tau * (f_prev - f_next) + 1e-9) ++run.step_control_failures;
    run.log.push_back({k, f_next, w2, res.iterations});
    run.trajectory.times.push_back(static_cast<double>(k) * cfg.tau);
    run.trajectory.states.push_back(pushforward_monotone(mu0, x0.values(), res.X.values()));
    run.quantiles.push_back(std::move(res.X));
    f_prev = f_next;
  }
  return run;
}

PdeComparison compare_with_pde(const FreeEnergyFunctional& f, const JkoRun& run, double tau, double pde_dt) {
  const Potential pot = potential_of(f);
  if (!(pde_dt > 0.0) || pde_dt > tau) throw std::invalid_argument("compare_with_pde: need 0 < pde_dt <= tau");
  const auto every = static_cast<std::size_t>(std::llround(tau / pde_dt));
  if (std::abs(static_cast<double>(every) * pde_dt - tau) > 1e-9 * tau)
    throw std::invalid_argument("compare_with_pde: pde_dt must divide tau");
  const auto& mu0 = run.trajectory.states.front();
  FlowSpec spec{.kind = pot.quadratic ? FlowKind::fokker_planck : FlowKind::heat,
                .grid = mu0.grid(),
                .dt = pde_dt,
                .horizon = run.trajectory.times.back(),
                .snapshot_every = every};
  const auto pde = solve(spec, mu0);
  if (pde.size() != run.trajectory.size()) throw SolverError("compare_with_pde: snapshot counts differ");

  PdeComparison cmp{{}, {}, 0.0};
  for (std::size_t k = 0; k < pde.size(); ++k) {
    const double gap = l1_distance(run.trajectory.states[k], pde.states[k]);
    cmp.times.push_back(run.trajectory.times[k]);
    cmp.l1_gaps.push_back(gap);
    cmp.max_gap = std::max(cmp.max_gap, gap);
  }
  return cmp;
}

void write_jko_log_csv(std::ostream& out, const JkoRun& run) {
  CsvWriter csv(out, {"k", "F", "W2_step", "inner_iters"});
  for (const auto& row : run.log) {
    csv.cell(static_cast<long long>(row.k)).cell(row.F).cell(row.w2_step).cell(static_cast<long long>(row.inner_iters));
    csv.end_row();
  }
}

}  // namespace entroflow
