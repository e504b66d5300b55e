// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "entroflow/bank.hpp"
#include "entroflow/finite_flow.hpp"
#include "entroflow/inequalities.hpp"
#include "entroflow/jko.hpp"
#include "entroflow/pde_flows.hpp"
#include "entroflow/random.hpp"
#include "entroflow/wasserstein.hpp"

using namespace entroflow;

namespace {

// Every PDE and JKO snapshot produced below, for the conservation criterion.
struct SnapshotAudit {
  std::size_t snapshots = 0;
  double worst_mass_error = 0.0;
  double smallest_value = std::numeric_limits<double>::infinity();

  void add(const DensityTrajectory& traj) {
    for (const auto& s : traj.states) {
      ++snapshots;
      worst_mass_error = std::max(worst_mass_error, std::abs(s.mass() - 1.0));
      smallest_value = std::min(smallest_value, s.min_value());
    }
  }
};

SnapshotAudit audit;
// Heat run kept for the monotonicity part of criterion 10.
DensityTrajectory heat_run;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Point point(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Outcome finite_equality_case() {
  const auto p = quadratic_potential(2);
  double eep_gap = 0.0, ratio_dev = 0.0, path_err = 0.0;
  for (const auto& x0 : {point({1.0, 0.0}), point({0.3, -1.7}), point({-2.0, 0.5})}) {
    const auto traj = integrate_flow(p, x0, 1e-3, 1.0);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto& x = traj.states[k];
      const auto e = eep_inequality_check(p, x);
      eep_gap = std::max(eep_gap, std::abs(e.lhs - e.rhs));
      path_err = std::max(path_err, (x - std::exp(-traj.times[k]) * x0).norm());
    }
    ratio_dev = std::max(ratio_dev, std::abs(production_decay_check(p, traj).worst_ratio - 1.0));
    // worst_ratio is a maximum; the minimum along the path must also be 1.
    const double g0 = p.gradient(x0).squaredNorm();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double r = p.gradient(traj.states[k]).squaredNorm() / (std::exp(-2.0 * traj.times[k]) * g0);
      ratio_dev = std::max(ratio_dev, std::abs(r - 1.0));
    }
  }
  return {eep_gap <= 1e-9 && ratio_dev <= 1e-6 && path_err <= 1e-9,
          fmt("|lhs-rhs|=%.2e ratio-1=%.2e path=%.2e", eep_gap, ratio_dev, path_err)};
}

Outcome de_bruijn_heat() {
  const Grid g = make_uniform_grid(-8.0, 8.0, 1025, 1, Geometry::line);
  const FlowSpec spec{.kind = FlowKind::heat, .grid = g, .dt = 1e-4, .horizon = 0.5, .snapshot_every = 1};
  heat_run = solve(spec, standard_gaussian(g));
  audit.add(heat_run);
  const auto check = de_bruijn_pde_check(heat_run, 0.05, 0.5);
  double rate_err = 0.0, fisher_err = 0.0;
  for (const auto& row : check.rows) {
    const double exact = -1.0 / (1.0 + 2.0 * row.t);
    rate_err = std::max(rate_err, std::abs(row.entropy_rate - exact));
    fisher_err = std::max(fisher_err, std::abs(-row.fisher - exact));
  }
  return {!check.rows.empty() && check.max_residual <= 1e-3 && rate_err <= 1e-3 && fisher_err <= 1e-3,
          fmt("residual=%.2e dEnt/dt err=%.2e fisher err=%.2e rows=%zu", check.max_residual, rate_err, fisher_err,
              check.rows.size())};
}

Outcome fokker_planck_rates() {
  const Grid g = make_uniform_grid(-10.0, 10.0, 1001, 1, Geometry::line);
  const FlowSpec spec{.kind = FlowKind::fokker_planck, .grid = g, .dt = 1e-3, .horizon = 3.0, .snapshot_every = 10};
  const auto traj = solve(spec, gaussian(g, 2.0, 1.0));
  audit.add(traj);
  const auto rep = dissipation_report(traj, lyapunov_functional(FlowKind::fokker_planck, g));
  const bool ok = std::abs(rep.production_rate - 2.0) <= 0.1 && std::abs(rep.value_rate - 2.0) <= 0.1 && rep.pass();
  return {ok, fmt("production rate=%.4f free-energy rate=%.4f bound ratio=%.6f", rep.production_rate, rep.value_rate,
                  rep.max_bound_ratio)};
}

Outcome log_sobolev() {
  const auto rows = run_inequality_bank(InequalityKind::lsi, 7, 200);
  const auto violations = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; });
  const Grid g = make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(0.7 * g[i]);
  const auto ex = lsi_check(g, f);
  return {violations == 0 && rows.size() == 200 && ex.ratio >= 0.999 && ex.ratio <= 1.0,
          fmt("bank violations=%ld/%zu exponential ratio=%.6f", static_cast<long>(violations), rows.size(), ex.ratio)};
}

Outcome optimal_sobolev() {
  const Grid g = make_uniform_grid(0.0, 200.0, 20000, 3, Geometry::radial);
  // The extremal decays like 1/r: its boundary value is 1/200 of its peak.
  const auto ext = sobolev_check(g, sobolev_extremal(g, 3), 3, 1e-2);
  const auto bank = sobolev_bank(7, 50);
  double worst = 0.0;
  for (const auto& f : bank.samples) worst = std::max(worst, sobolev_check(bank.grid, f, 3).ratio_to_optimal);
  return {std::abs(ext.ratio_to_optimal - 1.0) <= 1e-2 && worst <= 1.0,
          fmt("extremal ratio=%.6f C_op=%.6f worst of %zu=%.6f", ext.ratio_to_optimal,
              sobolev_constant(3, 200.0, sobolev_oracle_resolution(g.size())), bank.samples.size(), worst)};
}

Outcome fast_diffusion() {
  const Grid r = make_uniform_grid(0.0, 10.0, 501, 3, Geometry::radial);
  const auto st = stationary_fd(3, r);
  const FlowSpec rest{.kind = FlowKind::fast_diffusion, .grid = r, .dt = 1e-2, .horizon = 1.0, .n = 3, .snapshot_every = 1};
  const auto still = solve(rest, st.density);
  audit.add(still);
  double fixed = 0.0;
  for (const auto& s : still.states) fixed = std::max(fixed, l1_distance(s, st.density));

  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.density[i] * (1.0 + 0.5 * std::exp(-(r[i] - 1.0) * (r[i] - 1.0)));
  const FlowSpec moving{.kind = FlowKind::fast_diffusion, .grid = r, .dt = 1e-2, .horizon = 4.0, .n = 3, .snapshot_every = 5};
  const auto traj = solve(moving, normalize(v, r));
  audit.add(traj);
  const auto rep = dissipation_report(traj, lyapunov_functional(FlowKind::fast_diffusion, r, 3));
  const double need = 2.0 * (2.0 / 3.0) * 0.95;

  const auto rows = run_inequality_bank(InequalityKind::eep_fd, 7, 200);
  const auto violations = std::count_if(rows.begin(), rows.end(), [](const auto& c) { return !c.pass; });
  return {fixed <= 1e-6 && rep.value_rate >= need && violations == 0,
          fmt("fixed-point L1=%.2e decay rate=%.4f (need %.4f) eep_fd violations=%ld/%zu", fixed, rep.value_rate, need,
              static_cast<long>(violations), rows.size())};
}

Outcome wasserstein_oracles() {
  const Grid g = make_uniform_grid(-12.0, 12.0, 2401, 1, Geometry::line);
  const std::size_t m = 20000;
  double gauss_err = 0.0;
  struct Pair {
    double m1, s1, m2, s2;
  };
  for (const auto& c : {Pair{0.0, 1.0, 1.0, 1.0}, Pair{0.0, 1.0, 0.0, 2.0}, Pair{-1.0, 0.6, 1.5, 1.4}}) {
    const double w = w2_1d(gaussian(g, c.m1, c.s1), gaussian(g, c.m2, c.s2), m);
    gauss_err = std::max(gauss_err, std::abs(w - std::hypot(c.m1 - c.m2, c.s1 - c.s2)));
  }

  Rng rng(2024);
  double atom_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(8), b(8);
    for (auto& x : a) x = rng.uniform(-3.0, 3.0);
    for (auto& x : b) x = rng.uniform(-1.0, 5.0);
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t i = 0; i < 8; ++i) c += (a[i] - b[perm[i]]) * (a[i] - b[perm[i]]);
      best = std::min(best, c / 8.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    atom_err = std::max(atom_err, std::abs(best - monotone_coupling_cost(a, b)));
  }

  const auto mu = gaussian(g, -1.0, 0.8);
  const auto nu = gaussian(g, 1.0, 1.3);
  const double d = w2_1d(mu, nu, m);
  double speed_err = 0.0;
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    speed_err = std::max(speed_err, std::abs(w2_1d(mu, mccann_geodesic(mu, nu, s, m), m) - s * d));
  }
  const auto path = mccann_path(mu, nu, 40, 4000);
  const double action = path_action(path);
  const double action_rel = std::abs(action - d * d) / (d * d);
  return {gauss_err <= 1e-4 && atom_err <= 1e-12 && speed_err <= 1e-4 && action_rel <= 0.02,
          fmt("gaussian err=%.2e 8-atom err=%.2e speed err=%.2e action/W2^2-1=%.2e", gauss_err, atom_err, speed_err,
              action_rel)};
}

Outcome jko_consistency() {
  const Grid g = make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line);
  const auto fp = FreeEnergyFunctional::fp_free_energy();
  std::vector<double> gaps;
  std::size_t increases = 0;
  for (double tau : {0.08, 0.04, 0.02}) {
    JkoConfig cfg;
    cfg.tau = tau;
    cfg.K = static_cast<std::size_t>(std::llround(1.0 / tau));
    cfg.M = 2000;
    const auto run = jko_trajectory(fp, gaussian(g, 1.0, 1.0), cfg);
    audit.add(run.trajectory);
    increases += run.energy_increases;
    gaps.push_back(compare_with_pde(fp, run, tau, 1e-3).max_gap);
  }
  const bool decreasing = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {decreasing && gaps[2] <= 0.02 && increases == 0,
          fmt("max L1 gaps=%.4f, %.4f, %.4f energy increases=%zu", gaps[0], gaps[1], gaps[2], increases)};
}

Outcome zugmeyer() {
  const auto rows = run_inequality_bank(InequalityKind::zugmeyer, 7, 200);
  const auto violations = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; });
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) min_margin = std::min(min_margin, r.margin);
  bool refused = false;
  std::string diagnostic;
  const auto too_large = default_zugmeyer_problem(8.5);
  try {
    zugmeyer_check(too_large, too_large.v);
  } catch (const HypothesisViolation& e) {
    diagnostic = e.what();
    refused = !diagnostic.empty();
  }
  return {violations == 0 && rows.size() == 200 && refused,
          fmt("bank violations=%ld/%zu min margin=%.3e C=8.5 refused=%s", static_cast<long>(violations), rows.size(),
              min_margin, refused ? "yes" : "no")};
}

Outcome conservation() {
  const auto ent = FreeEnergyFunctional::boltzmann_entropy();
  const double ent_up = max_value_increase(heat_run, ent);
  const double l2_up = max_value_increase(heat_run, FreeEnergyFunctional::lp_norm(2.0));
  const double l3_up = max_value_increase(heat_run, FreeEnergyFunctional::lp_norm(3.0));
  const bool ok = audit.snapshots > 0 && audit.worst_mass_error <= 1e-8 && audit.smallest_value > 0.0 &&
                  ent_up <= 0.0 && l2_up <= 0.0 && l3_up <= 0.0;
  return {ok, fmt("snapshots=%zu max|mass-1|=%.2e min value=%.2e max increase Ent=%.2e L2=%.2e L3=%.2e",
                  audit.snapshots, audit.worst_mass_error, audit.smallest_value, ent_up, l2_up, l3_up)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"finite-dimensional equality case", finite_equality_case},
      {"de Bruijn identity along heat flow", de_bruijn_heat},
      {"Fokker-Planck decay rates", fokker_planck_rates},
      {"Gaussian log-Sobolev", log_sobolev},
      {"optimal Sobolev saturation", optimal_sobolev},
      {"fast diffusion", fast_diffusion},
      {"Wasserstein oracles", wasserstein_oracles},
      {"JKO consistency", jko_consistency},
      {"Zugmeyer checker", zugmeyer},
      {"conservation and positivity", conservation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
