#include "entroflow/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

#include "entroflow/csv.hpp"
#include "entroflow/functionals.hpp"
#include "entroflow/pde_flows.hpp"

namespace entroflow {

namespace {

constexpr double kHypothesisSlack = 1e-10;

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

std::pair<double, double> sobolev_norms(const Grid& grid, std::span<const double> f, int n) {
  const double p = 2.0 * n / (n - 2.0);
  std::vector<double> fp(f.size()), g2(f.size());
  const auto df = gradient_fd(f, grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    fp[i] = std::pow(std::abs(f[i]), p);
    g2[i] = df[i] * df[i];
  }
  return {std::pow(integrate(fp, grid), 1.0 / p), std::sqrt(integrate(g2, grid))};
}

EepResult finish_eep(double lhs, double rhs) {
  const double tol = inequality_tolerance(rhs);
  const bool equality = std::abs(lhs - rhs) <= 1e-3 * std::abs(rhs) + tol;
  return {lhs, rhs, equality, lhs >= -tol && lhs <= rhs + tol};
}

}  // namespace

double inequality_tolerance(double rhs) { return 1e-6 * std::max(1.0, std::abs(rhs)); }

LsiResult lsi_check(const Grid& grid, std::span<const double> f) {
  if (grid.radial()) throw std::invalid_argument("lsi_check: line grid required");
  if (f.size() != grid.size()) throw std::invalid_argument("lsi_check: sample count differs from grid size");
  for (double v : f)
    if (!(v > 0.0)) throw std::invalid_argument("lsi_check: f must be positive");

  const GridDensity gamma = standard_gaussian(grid);
  std::vector<double> tmp(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) tmp[i] = f[i] * gamma[i];
  const double mean_f = integrate(tmp, grid);

  const auto df = gradient_fd(f, grid);
  std::vector<double> fisher(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    tmp[i] = f[i] * std::log(f[i] / mean_f) * gamma[i];
    fisher[i] = df[i] * df[i] / f[i] * gamma[i];
  }
  const double lhs = integrate(tmp, grid);
  const double rhs = 0.5 * integrate(fisher, grid);
  const double tol = inequality_tolerance(rhs);
  const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
  return {lhs, rhs, ratio, lhs <= rhs + tol};
}

std::vector<double> sobolev_extremal(const Grid& grid, int n, double lambda) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = lambda * grid[i];
    f[i] = std::pow(1.0 + r * r, -(n - 2) / 2.0);
  }
  return f;
}

std::size_t sobolev_oracle_resolution(std::size_t nodes) { return std::max<std::size_t>(8 * nodes, 200001); }

double sobolev_constant(int n, double radius, std::size_t resolution) {
  if (n <= 2) throw std::invalid_argument("sobolev_constant: needs n > 2");
  if (!(radius > 0.0) || resolution < 8) throw std::invalid_argument("sobolev_constant: bad ball");
  static std::mutex mutex;
  static std::map<std::tuple<int, double, std::size_t>, double> cache;
  const auto key = std::make_tuple(n, radius, resolution);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const Grid grid = make_uniform_grid(0.0, radius, resolution, n, Geometry::radial);
  const auto f = sobolev_extremal(grid, n);
  const auto [lhs, rhs] = sobolev_norms(grid, f, n);
  const double c = lhs / rhs;
  std::lock_guard lock(mutex);
  cache.emplace(key, c);
  return c;
}

SobolevResult sobolev_check(const Grid& grid, std::span<const double> f, int n, double boundary_tolerance) {
  if (n <= 2) throw std::invalid_argument("sobolev_check: needs n > 2");
  if (!grid.radial() || grid.dim() != n) throw std::invalid_argument("sobolev_check: needs a radial grid of dimension n");
  if (f.size() != grid.size()) throw std::invalid_argument("sobolev_check: sample count differs from grid size");
  const double peak = max_abs(f);
  if (!(peak > 0.0)) throw std::invalid_argument("sobolev_check: f vanishes identically");
  if (std::abs(f.back()) > boundary_tolerance * peak) {
    std::ostringstream msg;
    msg << "sobolev_check: boundary value " << f.back() << " exceeds " << boundary_tolerance << " of max|f| = " << peak;
    throw std::invalid_argument(msg.str());
  }
  const auto [lhs, rhs] = sobolev_norms(grid, f, n);
  if (!(rhs > 0.0)) throw std::invalid_argument("sobolev_check: f has zero gradient");
  const double c_op = sobolev_constant(n, grid.upper(), sobolev_oracle_resolution(grid.size()));
  const double ratio = lhs / rhs / c_op;
  return {lhs, rhs, ratio, ratio <= 1.0 + 1e-3};
}

EepResult eep_check_fp(const GridDensity& mu) {
  if (mu.grid().radial()) throw std::invalid_argument("eep_check_fp: line grid required");
  const auto f = lyapunov_functional(FlowKind::fokker_planck, mu.grid());
  const double lhs = value(f, mu) - value(f, *f.minimizer());
  const double rhs = 0.5 * production(f, mu);
  return finish_eep(lhs, rhs);
}

EepResult eep_check_fd(const GridDensity& mu, int n) {
  const auto f = lyapunov_functional(FlowKind::fast_diffusion, mu.grid(), n);
  const double lhs = value(f, mu) - value(f, *f.minimizer());
  const double rhs = production(f, mu) / (2.0 * *f.rho());
  return finish_eep(lhs, rhs);
}

ZugmeyerProblem entropy_zugmeyer_problem(Grid omega, std::vector<double> v, double C, int n) {
  ZugmeyerProblem p{
      .H = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
      .Psi = [](double x) { return 1.0 + safe_log(x); },
      .n = n,
      .omega = std::move(omega),
      .v = std::move(v),
      .C = C,
  };
  return p;
}

bool HypothesisReport::ok() const {
  return h_at_zero == 0.0 && min_h_second > 0.0 && hyp1_worst >= -kHypothesisSlack && hyp2_worst >= -kHypothesisSlack;
}

std::string HypothesisReport::describe() const {
  std::ostringstream s;
  bool any = false;
  auto sep = [&] {
    if (any) s << "; ";
    any = true;
  };
  if (h_at_zero != 0.0) {
    sep();
    s << "H(0) = " << h_at_zero << " (must be 0)";
  }
  if (!(min_h_second > 0.0)) {
    sep();
    s << "H is not strictly convex (min sampled H'' = " << min_h_second << ")";
  }
  if (hyp1_worst < -kHypothesisSlack) {
    sep();
    s << "hypothesis x U'(x) + (1-n)/n U(x) >= 0 fails at x = " << hyp1_worst_x << " (value " << hyp1_worst << ")";
  }
  if (hyp2_worst < -kHypothesisSlack) {
    sep();
    s << "hypothesis -Hess Psi(v) >= C fails at node " << hyp2_worst_node << " (short by " << -hyp2_worst << ")";
  }
  if (!any) s << "all hypotheses hold";
  return s.str();
}

HypothesisReport check_hypotheses(const ZugmeyerProblem& p, double upper) {
  if (!p.H || !p.Psi) throw std::invalid_argument("zugmeyer: H and Psi must be set");
  if (p.n < 1) throw std::invalid_argument("zugmeyer: n must be >= 1");
  if (!(p.C > 0.0)) throw std::invalid_argument("zugmeyer: C must be > 0");
  if (p.v.size() != p.omega.size()) throw std::invalid_argument("zugmeyer: v sample count differs from grid size");
  for (double x : p.v)
    if (!(x > 0.0)) throw std::invalid_argument("zugmeyer: v must be positive");
  if (!(upper > 0.0)) throw std::invalid_argument("zugmeyer: sampling range must be positive");

  HypothesisReport rep{p.H(0.0), std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                       0.0, std::numeric_limits<double>::infinity(), 0};

  const int samples = 400;
  const double lo = upper * 1e-8;
  const double ratio = (1.0 - p.n) / p.n;
  for (int k = 0; k < samples; ++k) {
    const double x = lo * std::pow(upper / lo, static_cast<double>(k) / (samples - 1));
    const double dh = 1e-4 * x;
    const double h2 = (p.H(x + dh) - 2.0 * p.H(x) + p.H(x - dh)) / (dh * dh);
    rep.min_h_second = std::min(rep.min_h_second, h2);
    const double du = 1e-5 * x;
    const double u_prime = (p.U(x + du) - p.U(x - du)) / (2.0 * du);
    const double h1 = x * u_prime + ratio * p.U(x);
    if (h1 < rep.hyp1_worst) {
      rep.hyp1_worst = h1;
      rep.hyp1_worst_x = x;
    }
  }

  const Grid& g = p.omega;
  std::vector<double> w(p.v.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = p.Psi(p.v[i]);
  const auto w2 = second_derivative_fd(w, g);
  const auto w1 = gradient_fd(w, g);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double eig_max = w2[i];
    if (g.radial() && g.dim() > 1) {
      const double tangential = g[i] > 0.0 ? w1[i] / g[i] : w2[i];
      eig_max = std::max(eig_max, tangential);
    }
    const double margin = -eig_max - p.C;
    if (margin < rep.hyp2_worst) {
      rep.hyp2_worst = margin;
      rep.hyp2_worst_node = i;
    }
  }
  return rep;
}

ZugmeyerResult zugmeyer_check(const ZugmeyerProblem& p, std::span<const double> u) {
  const Grid& g = p.omega;
  if (u.size() != g.size()) throw std::invalid_argument("zugmeyer: u sample count differs from grid size");
  for (double x : u)
    if (!(x > 0.0)) throw std::invalid_argument("zugmeyer: u must be positive");
  const double mass_u = integrate(u, g);
  const double mass_v = integrate(p.v, g);
  if (std::abs(mass_u - mass_v) > 1e-8 * std::max(1.0, std::abs(mass_v))) {
    std::ostringstream msg;
    msg << "zugmeyer: integral of u (" << mass_u << ") differs from integral of v (" << mass_v << ")";
    throw std::invalid_argument(msg.str());
  }
  const double upper = std::max(*std::max_element(u.begin(), u.end()), *std::max_element(p.v.begin(), p.v.end()));
  const auto rep = check_hypotheses(p, upper);
  if (!rep.ok()) throw HypothesisViolation("zugmeyer: refused, " + rep.describe());

  std::vector<double> bregman(u.size()), diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double psi_v = p.Psi(p.v[i]);
    bregman[i] = p.H(u[i]) - p.H(p.v[i]) - (u[i] - p.v[i]) * psi_v;
    diff[i] = psi_v - p.Psi(u[i]);
  }
  const auto grad = gradient_fd(diff, g);
  std::vector<double> weighted(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) weighted[i] = grad[i] * grad[i] * u[i];
  const double lhs = integrate(bregman, g);
  const double rhs = integrate(weighted, g) / (2.0 * p.C);
  const double tol = inequality_tolerance(rhs);
  return {lhs, rhs, rep, lhs >= -tol && lhs <= rhs + tol};
}

void write_inequality_csv(std::ostream& out, const std::vector<InequalityCase>& cases) {
  CsvWriter csv(out, {"case_id", "lhs", "rhs", "margin", "pass"});
  for (const auto& c : cases) {
    csv.cell(static_cast<long long>(c.case_id)).cell(c.lhs).cell(c.rhs).cell(c.margin).cell(c.pass);
    csv.end_row();
  }
}

}  // namespace entroflow
