// entroflow command-line front end.
//
// Exit codes: 0 all checks pass, 1 a check or solver failed, 2 config error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entroflow/bank.hpp"
#include "entroflow/csv.hpp"
#include "entroflow/finite_flow.hpp"
#include "entroflow/inequalities.hpp"
#include "entroflow/jko.hpp"
#include "entroflow/pde_flows.hpp"
#include "entroflow/random.hpp"
#include "entroflow/wasserstein.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace entroflow;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void bad_field(const std::string& key, const std::string& why) {
  throw ConfigError("field `" + key + "`: " + why);
}

// Resolved settings for one command: file values overridden by flags, with
// defaults filled in on first use. Every key read is echoed to the manifest.
class Settings {
 public:
  explicit Settings(json raw) : raw_(std::move(raw)) {}

  double real(const std::string& key, double def, const std::function<bool(double)>& ok = {},
              const std::string& rule = "") {
    double v = def;
    if (auto it = find(key)) {
      if (!it->is_number()) bad_field(key, "expected a number, got " + it->dump());
      v = it->get<double>();
    }
    if (!std::isfinite(v) || (ok && !ok(v))) bad_field(key, rule.empty() ? "invalid value" : rule + ", got " + format_number(v));
    resolved_[key] = v;
    return v;
  }

  long long integer(const std::string& key, long long def, long long min) {
    long long v = def;
    if (auto it = find(key)) {
      if (!it->is_number_integer()) bad_field(key, "expected an integer, got " + it->dump());
      v = it->get<long long>();
    }
    if (v < min) bad_field(key, "must be >= " + std::to_string(min) + ", got " + std::to_string(v));
    resolved_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {}) {
    std::string v = def;
    if (auto it = find(key)) {
      if (!it->is_string()) bad_field(key, "expected a string, got " + it->dump());
      v = it->get<std::string>();
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      bad_field(key, "must be one of {" + list + "}, got '" + v + "'");
    }
    resolved_[key] = v;
    return v;
  }

  bool flag(const std::string& key, bool def) {
    bool v = def;
    if (auto it = find(key)) {
      if (!it->is_boolean()) bad_field(key, "expected true or false, got " + it->dump());
      v = it->get<bool>();
    }
    resolved_[key] = v;
    return v;
  }

  bool has(const std::string& key) const { return raw_.contains(key); }

  // Keys supplied but never read are typos or belong to another command.
  void reject_unused() const {
    for (const auto& [key, value] : raw_.items()) {
      if (!used_.count(key)) bad_field(key, "unknown for this command");
    }
  }

  const json& resolved() const { return resolved_; }

 private:
  const json* find(const std::string& key) {
    used_.insert(key);
    return raw_.contains(key) ? &raw_.at(key) : nullptr;
  }

  json raw_;
  json resolved_ = json::object();
  std::set<std::string> used_;
};

struct Output {
  fs::path dir;

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  }
};

auto positive = [](double v) { return v > 0.0; };

Grid line_or_radial(Settings& s, bool radial, int dim) {
  const double lo = s.real("lo", radial ? 0.0 : -8.0);
  const double hi = s.real("hi", radial ? 10.0 : 8.0);
  if (radial && lo != 0.0) bad_field("lo", "radial grids start at 0");
  if (!(hi > lo)) bad_field("hi", "must exceed lo");
  const auto n = s.integer("N", radial ? 501 : 801, 3);
  return make_uniform_grid(lo, hi, static_cast<std::size_t>(n), radial ? dim : 1,
                           radial ? Geometry::radial : Geometry::line);
}

GridDensity load_density(const std::string& key, const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) bad_field(key, "cannot open '" + path + "'");
  try {
    auto mu = read_density_csv(in, dim);
    if (std::abs(mu.mass() - 1.0) > 1e-8) bad_field(key, "density in '" + path + "' does not have mass 1");
    return mu;
  } catch (const std::invalid_argument& e) {
    bad_field(key, e.what());
  }
}

int simulate(Settings& s, const Output& out) {
  const auto kind = flow_kind_from_string(s.text("flow", "heat", {"heat", "fokker_planck", "fast_diffusion"}));
  const bool fd = kind == FlowKind::fast_diffusion;
  const int n = static_cast<int>(s.integer("n", 3, fd ? 3 : 1));
  const bool radial = fd || s.text("geometry", "line", {"line", "radial"}) == "radial";
  const Grid grid = line_or_radial(s, radial, n);
  const double dt = s.real("dt", 1e-3, positive, "must be > 0");
  const double horizon = s.real("T", 1.0, [dt](double v) { return v >= dt; }, "must be >= dt");
  const auto every = s.integer("snapshot_every", 10, 1);

  const std::string init = s.text("initial", fd ? "fd_perturbed" : "gaussian", {"gaussian", "fd_perturbed", "file"});
  GridDensity mu0 = standard_gaussian(grid);
  if (init == "gaussian") {
    const double m = s.real("mean", 0.0);
    const double sigma = s.real("sigma", 1.0, positive, "must be > 0");
    mu0 = gaussian(grid, m, sigma);
  } else if (init == "fd_perturbed") {
    if (!radial) bad_field("initial", "fd_perturbed needs a radial grid");
    const double amp = s.real("amplitude", 0.5, [](double v) { return v > -1.0; }, "must be > -1");
    const auto st = stationary_fd(n, grid);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.density[i] * (1.0 + amp * std::exp(-(grid[i] - 1.0) * (grid[i] - 1.0)));
    mu0 = normalize(v, grid);
  } else {
    mu0 = load_density("input", s.text("input", ""), radial ? n : 1);
    if (mu0.size() != grid.size() || mu0.grid().lower() != grid.lower() || mu0.grid().upper() != grid.upper())
      bad_field("input", "grid differs from lo/hi/N");
    mu0 = GridDensity(grid, std::vector<double>(mu0.values().begin(), mu0.values().end()));
  }
  const bool diagnose = s.flag("diagnose", false);
  s.reject_unused();

  FlowSpec spec{.kind = kind, .grid = grid, .dt = dt, .horizon = horizon, .n = n,
                .snapshot_every = static_cast<std::size_t>(every)};
  if (diagnose) spec.snapshot_every = 1;
  const auto run = solve_with_stats(spec, mu0);
  {
    auto f = out.open("snapshots.csv");
    DensityTrajectory kept;
    for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
      const auto step = static_cast<long long>(std::llround(run.trajectory.times[k] / dt));
      if (step % every == 0 || k + 1 == run.trajectory.size()) {
        kept.times.push_back(run.trajectory.times[k]);
        kept.states.push_back(run.trajectory.states[k]);
      }
    }
    write_snapshots_csv(f, kept);
  }
  std::cout << "steps=" << run.stats.steps << "\nmax_mass_drift=" << format_number(run.stats.max_mass_drift)
            << "\nmax_boundary_flux=" << format_number(run.stats.max_boundary_flux) << '\n';
  if (!diagnose) return 0;

  const auto f = lyapunov_functional(kind, grid, n);
  const auto rep = dissipation_report(run.trajectory, f);
  {
    auto o = out.open("report.csv");
    write_report_csv(o, rep);
  }
  {
    auto o = out.open("rates.csv");
    CsvWriter csv(o, {"quantity", "rate", "required", "pass"});
    const double need = 2.0 * rep.rho * 0.95;
    csv.cell("production").cell(rep.production_rate).cell(need).cell(rep.production_rate >= need);
    csv.end_row();
    csv.cell("value_gap").cell(rep.value_rate).cell(need).cell(rep.value_rate >= need);
    csv.end_row();
  }
  std::cout << "functional=" << f.name() << "\nrho=" << format_number(rep.rho)
            << "\nproduction_rate=" << format_number(rep.production_rate)
            << "\nvalue_rate=" << format_number(rep.value_rate)
            << "\nmax_bound_ratio=" << format_number(rep.max_bound_ratio)
            << "\nmax_value_increase=" << format_number(rep.max_value_increase) << '\n';
  bool ok = rep.pass();
  if (kind == FlowKind::heat && !radial) {
    const auto db = de_bruijn_pde_check(run.trajectory);
    auto o = out.open("de_bruijn.csv");
    CsvWriter csv(o, {"t", "entropy_rate", "fisher"});
    for (const auto& row : db.rows) {
      csv.cell(row.t).cell(row.entropy_rate).cell(row.fisher);
      csv.end_row();
    }
    std::cout << "de_bruijn_residual=" << format_number(db.max_residual) << '\n';
  }
  std::cout << "status=" << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : 1;
}

int diagnose(Settings& s, const Output& out, std::uint64_t seed) {
  const double dt = s.real("dt", 1e-3, positive, "must be > 0");
  const double horizon = s.real("T", 3.0, [dt](double v) { return v >= dt; }, "must be >= dt");
  const double lo = s.real("lo", -2.0);
  const double hi = s.real("hi", 2.0, [lo](double v) { return v > lo; }, "must exceed lo");
  s.reject_unused();

  auto o = out.open("diagnose.csv");
  CsvWriter csv(o, {"potential", "check", "value", "threshold", "pass"});
  bool all = true;
  Rng rng(seed);
  auto row = [&](const std::string& name, const std::string& check, double value, double threshold, bool pass) {
    csv.cell(name).cell(check).cell(value).cell(threshold).cell(pass);
    csv.end_row();
    all = all && pass;
  };
  for (const auto& p : potential_bank()) {
    const auto rep = check_potential(p, lo, hi, seed);
    row(p.name, "min_hessian_eigenvalue", rep.min_hessian_eigenvalue, p.rho, rep.convex_ok);
    row(p.name, "gradient_fd_error", rep.max_gradient_error, 1e-5, rep.gradient_ok);
    Point x0(p.dim);
    for (int k = 0; k < p.dim; ++k) x0[k] = rng.uniform(lo, hi);
    const auto traj = integrate_flow(p, x0, dt, horizon);
    const double g0 = p.gradient(x0).squaredNorm();
    const double db_tol = std::max(1e-6, 1e-4 * g0);
    const double db = de_bruijn_residual(p, traj);
    row(p.name, "de_bruijn_residual", db, db_tol, db <= db_tol);
    const auto prod = production_decay_check(p, traj);
    row(p.name, "production_decay_ratio", prod.worst_ratio, 1.0 + 1e-6, prod.pass);
    const auto ent = entropy_decay_check(p, traj);
    row(p.name, "energy_decay_ratio", ent.worst_ratio, 1.0 + 1e-6, ent.pass);
    double worst_eep = -std::numeric_limits<double>::infinity();
    bool eep_ok = true;
    for (const auto& x : traj.states) {
      const auto e = eep_inequality_check(p, x);
      worst_eep = std::max(worst_eep, e.lhs - e.rhs);
      eep_ok = eep_ok && e.pass;
    }
    row(p.name, "eep_worst_lhs_minus_rhs", worst_eep, 1e-9, eep_ok);
    const double up = max_energy_increase(p, traj);
    row(p.name, "max_energy_increase", up, 1e-10, up <= 1e-10);
    auto t = out.open("trajectory_" + p.name + ".csv");
    write_trajectory_csv(t, p, traj);
  }
  std::cout << "potentials=" << potential_bank().size() << "\nstatus=" << (all ? "pass" : "fail") << '\n';
  return all ? 0 : 1;
}

int jko(Settings& s, const Output& out) {
  const std::string name = s.text("functional", "fp_free_energy", {"boltzmann_entropy", "fp_free_energy"});
  const auto f = name == "fp_free_energy" ? FreeEnergyFunctional::fp_free_energy() : FreeEnergyFunctional::boltzmann_entropy();
  JkoConfig cfg;
  cfg.tau = s.real("tau", cfg.tau, positive, "must be > 0");
  cfg.K = static_cast<std::size_t>(s.integer("K", static_cast<long long>(cfg.K), 1));
  cfg.M = static_cast<std::size_t>(s.integer("M", static_cast<long long>(cfg.M), 64));
  cfg.tol = s.real("tol", cfg.tol, positive, "must be > 0");
  cfg.max_iter = static_cast<int>(s.integer("max_iter", cfg.max_iter, 1));
  const double lo = s.real("lo", -10.0);
  const double hi = s.real("hi", 10.0, [lo](double v) { return v > lo; }, "must exceed lo");
  const auto nodes = s.integer("N", 2001, 3);
  const double m = s.real("mean", 1.0);
  const double sigma = s.real("sigma", 1.0, positive, "must be > 0");
  const bool compare = s.flag("compare_pde", true);
  const double pde_dt = s.real("pde_dt", 1e-3, positive, "must be > 0");
  s.reject_unused();
  if (compare) {
    const double ratio = cfg.tau / pde_dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) bad_field("pde_dt", "must divide tau");
  }

  const Grid grid = make_uniform_grid(lo, hi, static_cast<std::size_t>(nodes), 1, Geometry::line);
  const auto run = jko_trajectory(f, gaussian(grid, m, sigma), cfg);
  {
    auto o = out.open("jko_log.csv");
    write_jko_log_csv(o, run);
  }
  {
    auto o = out.open("snapshots.csv");
    write_snapshots_csv(o, run.trajectory);
  }
  std::cout << "steps=" << cfg.K << "\nfinal_F=" << format_number(run.log.back().F)
            << "\nenergy_increases=" << run.energy_increases
            << "\nstep_control_failures=" << run.step_control_failures << '\n';
  if (compare) {
    const auto cmp = compare_with_pde(f, run, cfg.tau, pde_dt);
    auto o = out.open("jko_vs_pde.csv");
    CsvWriter csv(o, {"t", "l1_gap"});
    for (std::size_t k = 0; k < cmp.times.size(); ++k) {
      csv.cell(cmp.times[k]).cell(cmp.l1_gaps[k]);
      csv.end_row();
    }
    std::cout << "max_l1_gap=" << format_number(cmp.max_gap) << '\n';
  }
  const bool ok = run.energy_increases == 0 && run.step_control_failures == 0;
  std::cout << "status=" << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : 1;
}

int check(Settings& s, const Output& out, std::uint64_t seed) {
  const auto kind = inequality_kind_from_string(s.text("inequality", "lsi", {"lsi", "sobolev", "eep_fp", "eep_fd", "zugmeyer"}));
  s.text("bank", "default", {"default"});
  const auto count = static_cast<std::size_t>(s.integer("count", 200, 1));
  const double c = kind == InequalityKind::zugmeyer ? s.real("C", 8.0, positive, "must be > 0") : 8.0;
  s.reject_unused();

  std::vector<InequalityCase> rows;
  if (kind == InequalityKind::zugmeyer) {
    const auto p = default_zugmeyer_problem(c);
    const auto bank = zugmeyer_bank(p, seed, count);
    for (const auto& u : bank.samples) {
      try {
        const auto r = zugmeyer_check(p, u);
        rows.push_back({rows.size(), r.lhs, r.rhs, r.rhs - r.lhs, r.pass});
      } catch (const HypothesisViolation& e) {
        std::cerr << "entroflow: " << e.what() << '\n';
        std::cout << "status=refused\n";
        return 1;
      }
    }
  } else {
    rows = run_inequality_bank(kind, seed, count);
  }
  const std::string name = std::string("check_") + to_string(kind) + ".csv";
  {
    auto o = out.open(name);
    write_inequality_csv(o, rows);
  }
  const auto worst = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.margin < b.margin; });
  const auto failures = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; });
  {
    auto o = out.open(std::string("check_") + to_string(kind) + "_summary.csv");
    CsvWriter csv(o, {"cases", "failures", "worst_case_id", "worst_margin"});
    csv.cell(static_cast<long long>(rows.size())).cell(static_cast<long long>(failures));
    csv.cell(static_cast<long long>(worst->case_id)).cell(worst->margin);
    csv.end_row();
  }
  std::cout << "cases=" << rows.size() << "\nfailures=" << failures << "\nworst_case=" << worst->case_id
            << "\nworst_margin=" << format_number(worst->margin) << "\nstatus=" << (failures == 0 ? "pass" : "fail")
            << '\n';
  return failures == 0 ? 0 : 1;
}

int w2(Settings& s, const Output& out) {
  const double lo = s.real("lo", -12.0);
  const double hi = s.real("hi", 12.0, [lo](double v) { return v > lo; }, "must exceed lo");
  const auto nodes = s.integer("N", 2401, 3);
  const Grid grid = make_uniform_grid(lo, hi, static_cast<std::size_t>(nodes), 1, Geometry::line);
  auto density = [&](const std::string& prefix, double m, double sd) {
    if (s.has(prefix + "_file")) {
      auto mu = load_density(prefix + "_file", s.text(prefix + "_file", ""), 1);
      if (mu.size() != grid.size() || mu.grid().lower() != lo || mu.grid().upper() != hi)
        bad_field(prefix + "_file", "grid differs from lo/hi/N");
      return GridDensity(grid, std::vector<double>(mu.values().begin(), mu.values().end()));
    }
    const double mean = s.real(prefix + "_mean", m);
    const double sigma = s.real(prefix + "_sigma", sd, positive, "must be > 0");
    return gaussian(grid, mean, sigma);
  };
  const auto mu = density("mu", -1.0, 0.8);
  const auto nu = density("nu", 1.0, 1.3);
  const auto m = static_cast<std::size_t>(s.integer("M", 20000, 8));
  const auto steps = static_cast<std::size_t>(s.integer("steps", 20, 2));
  const auto geo_m = static_cast<std::size_t>(s.integer("geodesic_M", 4000, 8));
  s.reject_unused();

  const double d = w2_1d(mu, nu, m);
  const auto path = mccann_path(mu, nu, steps, geo_m);
  {
    auto o = out.open("geodesic.csv");
    write_geodesic_csv(o, path);
  }
  std::cout << "w2=" << format_number(d) << "\nw2_squared=" << format_number(d * d)
            << "\nmonge_cost=" << format_number(monge_cost(mu, nu, m))
            << "\npath_action=" << format_number(path_action(path))
            << "\nhj_residual=" << format_number(geodesic_hj_residual(path)) << '\n';
  return 0;
}

json read_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  if (j.contains("command")) {
    if (j["command"] != command) bad_field("command", "file is for '" + j["command"].dump() + "', not '" + command + "'");
    j.erase("command");
  }
  return j;
}

// Flag values are read as JSON literals where possible so "1e-3" is a
// number, "true" a boolean and anything else a string.
json literal(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::parse_error&) {
    return v;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-dissipating gradient flows, Wasserstein tools and inequality checkers."};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";
  long long seed = 7;
  app.add_option("--config", config_path, "JSON file of settings for the command; flags override it");
  app.add_option("--out", out_dir, "output directory (ENTROFLOW_OUT overrides)")->capture_default_str();
  app.add_option("--seed", seed, "seed for test banks and random starts")->capture_default_str();

  // Per-command settings given as flags, kept as text until resolution.
  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  std::map<std::string, bool> flags;
  auto command = [&](const std::string& name, const std::string& about,
                     const std::vector<std::pair<std::string, std::string>>& fields) {
    auto* sub = app.add_subcommand(name, about);
    sub->fallthrough();
    for (const auto& [key, help] : fields) {
      auto* opt = sub->add_option("--" + key, given[name][key], help);
      options[name].emplace_back(key, opt);
    }
    return sub;
  };

  auto* sim = command("simulate", "Run a PDE flow and optionally its dissipation diagnostics",
                      {{"flow", "heat | fokker_planck | fast_diffusion (default heat)"},
                       {"geometry", "line | radial for heat and fokker_planck (default line)"},
                       {"n", "ambient dimension for radial grids (default 3)"},
                       {"lo", "domain start (default -8 line, 0 radial)"},
                       {"hi", "domain end (default 8 line, 10 radial)"},
                       {"N", "node count (default 801 line, 501 radial)"},
                       {"dt", "time step (default 1e-3)"},
                       {"T", "final time (default 1)"},
                       {"snapshot_every", "steps between stored snapshots (default 10)"},
                       {"initial", "gaussian | fd_perturbed | file (default gaussian; fd_perturbed for fast diffusion)"},
                       {"mean", "initial Gaussian mean (default 0)"},
                       {"sigma", "initial Gaussian standard deviation (default 1)"},
                       {"amplitude", "bump amplitude for fd_perturbed (default 0.5)"},
                       {"input", "density CSV for initial = file"}});
  sim->add_flag("--diagnose", flags["diagnose"], "write report.csv and rates.csv and check the decay bounds");
  command("diagnose", "Check the finite-dimensional potential bank",
          {{"dt", "RK4 step (default 1e-3)"},
           {"T", "final time (default 3)"},
           {"lo", "sampling box start (default -2)"},
           {"hi", "sampling box end (default 2)"}});
  command("jko", "Minimizing-movement scheme on the line",
          {{"functional", "boltzmann_entropy | fp_free_energy (default fp_free_energy)"},
           {"tau", "step (default 0.02)"},
           {"K", "number of steps (default 50)"},
           {"M", "quantile nodes, >= 64 (default 1000)"},
           {"tol", "Newton decrement tolerance (default 1e-12)"},
           {"max_iter", "Newton iteration cap (default 100)"},
           {"lo", "domain start (default -10)"},
           {"hi", "domain end (default 10)"},
           {"N", "node count (default 2001)"},
           {"mean", "initial Gaussian mean (default 1)"},
           {"sigma", "initial Gaussian standard deviation (default 1)"},
           {"compare_pde", "true | false: compare with the PDE solver (default true)"},
           {"pde_dt", "PDE step for the comparison, must divide tau (default 1e-3)"}});
  command("check", "Run an inequality checker over its seeded bank",
          {{"inequality", "lsi | sobolev | eep_fp | eep_fd | zugmeyer (default lsi)"},
           {"bank", "default"},
           {"count", "number of cases (default 200)"},
           {"C", "Zugmeyer curvature constant (default 8)"}});
  command("w2", "Wasserstein distance, McCann geodesic and its action",
          {{"lo", "domain start (default -12)"},
           {"hi", "domain end (default 12)"},
           {"N", "node count (default 2401)"},
           {"mu_mean", "first Gaussian mean (default -1)"},
           {"mu_sigma", "first Gaussian standard deviation (default 0.8)"},
           {"nu_mean", "second Gaussian mean (default 1)"},
           {"nu_sigma", "second Gaussian standard deviation (default 1.3)"},
           {"mu_file", "density CSV replacing the first Gaussian"},
           {"nu_file", "density CSV replacing the second Gaussian"},
           {"M", "quantile nodes for W2 (default 20000)"},
           {"steps", "geodesic snapshots minus one (default 20)"},
           {"geodesic_M", "quantile nodes for the geodesic (default 4000)"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (seed < 0) bad_field("seed", "must be >= 0");
    json raw = config_path.empty() ? json::object() : read_config_file(config_path, name);
    for (const auto& [key, opt] : options[name]) {
      if (opt->count() > 0) raw[key] = literal(given[name][key]);
    }
    if (flags["diagnose"]) raw["diagnose"] = true;
    Settings settings(raw);

    if (const char* env = std::getenv("ENTROFLOW_OUT"); env && *env) out_dir = env;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    const Output out{out_dir};

    auto write_manifest = [&] {
      json manifest = {{"command", name}, {"seed", seed}, {"out", out_dir}, {"settings", settings.resolved()}};
      auto f = out.open("manifest");
      f << manifest.dump(2) << '\n';
    };

    int code = 0;
    try {
      if (name == "simulate") code = simulate(settings, out);
      else if (name == "diagnose") code = diagnose(settings, out, static_cast<std::uint64_t>(seed));
      else if (name == "jko") code = jko(settings, out);
      else if (name == "check") code = check(settings, out, static_cast<std::uint64_t>(seed));
      else code = w2(settings, out);
    } catch (const SolverError& e) {
      write_manifest();
      std::cerr << "entroflow: solver failure: " << e.what() << '\n';
      return 1;
    }
    write_manifest();
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "entroflow: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "entroflow: config error: " << e.what() << '\n';
    return 2;
  }
}
