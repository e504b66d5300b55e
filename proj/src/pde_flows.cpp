#include "entroflow/pde_flows.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "entroflow/csv.hpp"
#include "entroflow/tridiagonal.hpp"

namespace entroflow {

namespace {

// Bernoulli function z / (e^z − 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  return z / std::expm1(z);
}

struct Faces {
  std::vector<double> area;  // face measure divided by spacing, size N-1
};

Faces make_faces(const Grid& grid) {
  Faces f;
  const std::size_t n = grid.size();
  f.area.resize(n - 1);
  const double h = grid.spacing();
  for (std::size_t i = 0; i + 1 < n; ++i) f.area[i] = grid.area_factor(0.5 * (grid[i] + grid[i + 1])) / h;
  return f;
}

double confining_potential(FlowKind kind, double x) { return kind == FlowKind::fokker_planck ? 0.5 * x * x : 0.0; }

void validate(const FlowSpec& spec, const GridDensity& mu0) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("solve: dt must be > 0");
  if (!(spec.horizon >= spec.dt)) throw std::invalid_argument("solve: T must be >= dt");
  if (spec.snapshot_every == 0) throw std::invalid_argument("solve: snapshot_every must be >= 1");
  require_same_grid(spec.grid, mu0.grid(), "solve");
  if (std::abs(mu0.mass() - 1.0) > 1e-8) throw std::invalid_argument("solve: initial density must have mass 1");
  if (!(mu0.min_value() > 0.0)) throw std::invalid_argument("solve: initial density must be strictly positive");
  if (spec.kind == FlowKind::fast_diffusion) {
    if (!spec.grid.radial()) throw std::invalid_argument("solve: fast diffusion needs a radial grid");
    if (spec.n <= 2) throw std::invalid_argument("solve: fast diffusion needs n > 2");
    if (spec.grid.dim() != spec.n) throw std::invalid_argument("solve: grid dimension differs from n");
  }
}

// One implicit Euler step of the exponentially fitted linear scheme.
std::vector<double> linear_step(const Grid& grid, const Faces& faces, std::span<const double> potential,
                                std::span<const double> old, double dt) {
  const std::size_t n = grid.size();
  const auto vol = grid.weights();
  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = vol[i] / dt;
    rhs[i] = vol[i] / dt * old[i];
  }
  for (std::size_t f = 0; f + 1 < n; ++f) {
    const double dv = potential[f + 1] - potential[f];
    const double a = faces.area[f];
    const double bp = bernoulli(dv);
    const double bm = bernoulli(-dv);
    // Face flux a [B(−ΔV) μ_{f+1} − B(ΔV) μ_f] enters cell f and leaves cell f+1.
    diag[f] += a * bp;
    upper[f] -= a * bm;
    diag[f + 1] += a * bm;
    lower[f + 1] -= a * bp;
  }
  return solve_tridiagonal(lower, diag, upper, rhs);
}

// One implicit step of the fast-diffusion scheme; returns Newton iterations.
std::size_t fast_diffusion_step(const FlowSpec& spec, const Faces& faces, std::span<const double> old,
                                std::vector<double>& mu) {
  const Grid& grid = spec.grid;
  const std::size_t n = grid.size();
  const double dim = spec.n;
  const double c = (dim - 1.0) / dim;
  const auto vol = grid.weights();
  const auto r = grid.nodes();

  std::vector<double> k(n - 1);
  for (std::size_t f = 0; f + 1 < n; ++f) k[f] = c * faces.area[f] * 0.5 * (old[f] + old[f + 1]);

  // The origin node of a radial grid has zero trapezoid volume; its residual
  // is scaled by the neighbouring volume instead.
  std::vector<double> scale(vol.begin(), vol.end());
  if (scale[0] <= 0.0) scale[0] = scale[1];
  std::vector<double> p(n), s(n), res(n);
  auto evaluate = [&](const std::vector<double>& m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double root = std::pow(m[i], -1.0 / dim);
      p[i] = -root + 0.5 * r[i] * r[i];
      s[i] = root / (dim * m[i]);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) res[i] = vol[i] * (m[i] - old[i]) / spec.dt;
    for (std::size_t f = 0; f + 1 < n; ++f) {
      const double flux = k[f] * (p[f + 1] - p[f]);
      res[f] -= flux;
      res[f + 1] += flux;
    }
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(res[i]) * spec.dt / (scale[i] * m[i]));
    return worst;
  };

  mu.assign(old.begin(), old.end());
  double norm = evaluate(mu);
  std::vector<double> lower(n), diag(n), upper(n), rhs(n), trial(n);
  // Below this scaled residual the iteration is at roundoff level: full steps,
  // and stagnation counts as convergence.
  constexpr double kRoundoffFloor = 1e-9;
  for (int it = 0; it < spec.newton_max_iterations; ++it) {
    if (norm <= spec.newton_tolerance) return static_cast<std::size_t>(it);
    std::fill(lower.begin(), lower.end(), 0.0);
    std::fill(upper.begin(), upper.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = vol[i] / spec.dt;
      rhs[i] = -res[i];
    }
    for (std::size_t f = 0; f + 1 < n; ++f) {
      diag[f] += k[f] * s[f];
      upper[f] -= k[f] * s[f + 1];
      diag[f + 1] += k[f] * s[f + 1];
      lower[f + 1] -= k[f] * s[f];
    }
    const auto delta = solve_tridiagonal(lower, diag, upper, rhs);

    double alpha = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (delta[i] < 0.0) alpha = std::min(alpha, 0.9 * mu[i] / -delta[i]);
    }
    double trial_norm = 0.0;
    for (int back = 0; back < 40; ++back) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = mu[i] + alpha * delta[i];
      trial_norm = evaluate(trial);
      if (trial_norm < norm || norm <= kRoundoffFloor || alpha < 1e-10) break;
      alpha *= 0.5;
    }
    if (norm <= kRoundoffFloor && trial_norm >= norm) return static_cast<std::size_t>(it + 1);
    mu.swap(trial);
    norm = evaluate(mu);
  }
  if (norm <= kRoundoffFloor) return static_cast<std::size_t>(spec.newton_max_iterations);
  throw SolverError("fast diffusion: Newton did not converge (scaled residual " + format_number(norm) + ")");
}

}  // namespace

const char* to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::heat: return "heat";
    case FlowKind::fokker_planck: return "fokker_planck";
    case FlowKind::fast_diffusion: return "fast_diffusion";
  }
  return "unknown";
}

FlowKind flow_kind_from_string(const std::string& s) {
  if (s == "heat") return FlowKind::heat;
  if (s == "fokker_planck") return FlowKind::fokker_planck;
  if (s == "fast_diffusion") return FlowKind::fast_diffusion;
  throw std::invalid_argument("unknown flow kind '" + s + "'");
}

FlowRun solve_with_stats(const FlowSpec& spec, const GridDensity& mu0) {
  validate(spec, mu0);
  const Grid& grid = spec.grid;
  const std::size_t n = grid.size();
  const Faces faces = make_faces(grid);
  std::vector<double> potential(n);
  for (std::size_t i = 0; i < n; ++i) potential[i] = confining_potential(spec.kind, grid[i]);

  const auto steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));
  FlowRun run;
  run.trajectory.solver = std::string("implicit_fv_") + to_string(spec.kind);
  run.trajectory.step = spec.dt;
  run.trajectory.times.push_back(0.0);
  run.trajectory.states.push_back(mu0);
  run.stats.steps = steps;

  std::vector<double> cur(mu0.values().begin(), mu0.values().end());
  std::vector<double> next;
  const double mass0 = mu0.mass();
  double prev_mass = mass0;
  for (std::size_t step = 1; step <= steps; ++step) {
    if (spec.kind == FlowKind::fast_diffusion) {
      run.stats.newton_iterations += fast_diffusion_step(spec, faces, cur, next);
    } else {
      next = linear_step(grid, faces, potential, cur, spec.dt);
    }
    for (double v : next) {
      if (!(v > 0.0)) throw SolverError("solve: positivity lost at step " + std::to_string(step));
    }
    cur.swap(next);
    const double mass = integrate(cur, grid);
    run.stats.max_mass_drift = std::max(run.stats.max_mass_drift, std::abs(mass - mass0));
    run.stats.max_boundary_flux = std::max(run.stats.max_boundary_flux, std::abs(mass - prev_mass) / spec.dt);
    prev_mass = mass;
    if (step % spec.snapshot_every == 0 || step == steps) {
      run.trajectory.times.push_back(static_cast<double>(step) * spec.dt);
      run.trajectory.states.emplace_back(grid, cur);
    }
  }
  return run;
}

DensityTrajectory solve(const FlowSpec& spec, const GridDensity& mu0) {
  return solve_with_stats(spec, mu0).trajectory;
}

FdStationary stationary_fd(int n, const Grid& grid) {
  if (!grid.radial()) throw std::invalid_argument("stationary_fd: needs a radial grid");
  if (n <= 2) throw std::invalid_argument("stationary_fd: needs n > 2");
  if (grid.dim() != n) throw std::invalid_argument("stationary_fd: grid dimension differs from n");

  const auto w = grid.weights();
  const auto r = grid.nodes();
  auto mass = [&](double c) {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += w[i] * std::pow(c + 0.5 * r[i] * r[i], -n);
    return m;
  };
  double lo = 1e-3;
  double hi = 1.0;
  while (mass(lo) < 1.0) {
    lo *= 0.5;
    if (lo < 1e-12) throw SolverError("stationary_fd: cannot bracket the normalisation constant");
  }
  while (mass(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(c + 0.5 * r[i] * r[i], -n);
  GridDensity density = normalize(std::move(v), grid);

  // Outer tail via r = R/t on (0, 1]; inner hole when the grid starts at r0 > 0.
  const double big_r = grid.upper();
  const double omega = sphere_area(n);
  const int m = 4000;
  double tail = 0.0;
  for (int j = 1; j <= m; ++j) {
    const double t = static_cast<double>(j) / m;
    const double f = omega * std::pow(big_r, n) * std::pow(t, n - 1) * std::pow(c * t * t + 0.5 * big_r * big_r, -n);
    tail += (j == m ? 0.5 : 1.0) * f / m;
  }
  const double r0 = grid.lower();
  tail += omega / n * std::pow(r0, n) * std::pow(c, -n);
  return {std::move(density), c, tail, tail <= 1e-6};
}

FreeEnergyFunctional lyapunov_functional(FlowKind kind, const Grid& grid, int n) {
  switch (kind) {
    case FlowKind::heat: return FreeEnergyFunctional::boltzmann_entropy();
    case FlowKind::fokker_planck:
      return FreeEnergyFunctional::fp_free_energy().with_minimizer(standard_gaussian(grid));
    case FlowKind::fast_diffusion:
      return FreeEnergyFunctional::fd_free_energy(n).with_minimizer(stationary_fd(n, grid).density);
  }
  throw std::logic_error("lyapunov_functional: unknown flow");
}

DeBruijnCheck de_bruijn_pde_check(const DensityTrajectory& traj, double t_begin, double t_end) {
  if (traj.size() < 3) throw std::invalid_argument("de_bruijn_pde_check: need at least 3 snapshots");
  const auto ent = FreeEnergyFunctional::boltzmann_entropy();
  std::vector<double> values(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) values[k] = value(ent, traj.states[k]);
  DeBruijnCheck out{{}, 0.0};
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < t_begin || t > t_end) continue;
    const double rate = (values[k + 1] - values[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
    const double fisher = production(ent, traj.states[k]);
    out.rows.push_back({t, rate, fisher});
    out.max_residual = std::max(out.max_residual, std::abs(rate + fisher));
  }
  return out;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("fit_decay_rate: need >= 2 samples");
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += std::log(y[i]);
  }
  const double mt = st / static_cast<double>(t.size());
  const double my = sy / static_cast<double>(t.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (std::log(y[i]) - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  if (den <= 0.0) throw std::invalid_argument("fit_decay_rate: degenerate time samples");
  return -num / den;
}

double max_value_increase(const DensityTrajectory& traj, const FreeEnergyFunctional& f) {
  double worst = -std::numeric_limits<double>::infinity();
  double prev = value(f, traj.states.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double v = value(f, traj.states[k]);
    worst = std::max(worst, v - prev);
    prev = v;
  }
  return worst;
}

DissipationReport dissipation_report(const DensityTrajectory& traj, const FreeEnergyFunctional& f,
                                     const DissipationOptions& options) {
  if (traj.size() < 2) throw std::invalid_argument("dissipation_report: need at least 2 snapshots");
  DissipationReport rep{};
  rep.rho = f.rho().value_or(0.0);
  const double p0 = production(f, traj.states.front());
  rep.max_bound_ratio = 0.0;
  rep.max_value_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const double v = value(f, traj.states[k]);
    const double p = production(f, traj.states[k]);
    const double bound = std::exp(-2.0 * rep.rho * t) * p0;
    if (k > 0) rep.max_value_increase = std::max(rep.max_value_increase, v - rep.rows.back().value);
    rep.rows.push_back({t, v, p, bound});
    if (bound > 0.0) rep.max_bound_ratio = std::max(rep.max_bound_ratio, p / bound);
  }
  rep.minimum_value = f.minimizer() ? value(f, *f.minimizer()) : rep.rows.back().value;

  std::vector<double> tp, yp, tv, yv;
  const double gap0 = rep.rows.front().value - rep.minimum_value;
  for (const auto& row : rep.rows) {
    if (row.t < options.fit_from) continue;
    if (row.production > options.fit_floor * p0 && row.production > 0.0) {
      tp.push_back(row.t);
      yp.push_back(row.production);
    }
    const double gap = row.value - rep.minimum_value;
    if (gap > options.fit_floor * gap0 && gap > 0.0) {
      tv.push_back(row.t);
      yv.push_back(gap);
    }
  }
  rep.production_rate = tp.size() >= 2 ? fit_decay_rate(tp, yp) : std::numeric_limits<double>::infinity();
  rep.value_rate = tv.size() >= 2 ? fit_decay_rate(tv, yv) : std::numeric_limits<double>::infinity();

  // Starting at the minimiser leaves nothing to decay.
  const bool at_rest = p0 <= 1e-20;
  rep.bound_ok = at_rest || rep.max_bound_ratio <= 1.0 + options.bound_tolerance;
  const double need = 2.0 * rep.rho * (1.0 - options.rate_tolerance);
  rep.rate_ok = at_rest || rep.production_rate >= need;
  rep.monotone_ok = rep.max_value_increase <= options.monotone_tolerance;
  return rep;
}

void write_report_csv(std::ostream& out, const DissipationReport& report) {
  CsvWriter csv(out, {"t", "value", "production", "bound"});
  for (const auto& row : report.rows) {
    csv.cell(row.t).cell(row.value).cell(row.production).cell(row.bound);
    csv.end_row();
  }
}

void write_snapshots_csv(std::ostream& out, const DensityTrajectory& traj) {
  const bool radial = !traj.states.empty() && traj.states.front().grid().radial();
  CsvWriter csv(out, {"t", radial ? "r" : "x", "value"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto x = traj.states[k].grid().nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
      csv.cell(traj.times[k]).cell(x[i]).cell(traj.states[k][i]);
      csv.end_row();
    }
  }
}

}  // namespace entroflow
