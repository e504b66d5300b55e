#include "entroflow/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "entroflow/csv.hpp"

namespace entroflow {

namespace {

void require_line(const GridDensity& mu, const char* what) {
  if (mu.grid().radial())
    throw std::invalid_argument(std::string(what) + ": radial densities go through w2_radial_profile");
}

void require_unit_mass(const GridDensity& mu, const char* what) {
  if (std::abs(mu.mass() - 1.0) > 1e-8) throw std::invalid_argument(std::string(what) + ": density must have mass 1");
}

// Inverse of a nondecreasing CDF sampled at grid nodes, piecewise linear.
double invert_cdf(std::span<const double> cdf, std::span<const double> x, double q) {
  if (q <= 0.0) return x.front();
  if (q >= 1.0) return x.back();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
  std::size_t k = static_cast<std::size_t>(it - cdf.begin());
  if (k == 0) k = 1;
  const double c0 = cdf[k - 1];
  const double c1 = cdf[k];
  const double t = c1 > c0 ? (q - c0) / (c1 - c0) : 0.0;
  return x[k - 1] + std::clamp(t, 0.0, 1.0) * (x[k] - x[k - 1]);
}

}  // namespace

double w2_quantiles(const QuantileRep& a, const QuantileRep& b) {
  if (a.size() != b.size()) throw std::invalid_argument("w2: quantile resolutions differ");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum * a.dq());
}

double w2_1d(const GridDensity& mu, const GridDensity& nu, std::size_t quantile_nodes) {
  require_line(mu, "w2_1d");
  require_line(nu, "w2_1d");
  require_unit_mass(mu, "w2_1d");
  require_unit_mass(nu, "w2_1d");
  return w2_quantiles(cdf_and_quantile(mu, quantile_nodes), cdf_and_quantile(nu, quantile_nodes));
}

double w2_radial_profile(const GridDensity& mu, const GridDensity& nu, std::size_t quantile_nodes) {
  auto profile = [](const GridDensity& d) {
    const Grid& g = d.grid();
    if (!g.radial()) throw std::invalid_argument("w2_radial_profile: expects radial densities");
    Grid line(g.lower(), g.upper(), g.size(), 1, Geometry::line);
    std::vector<double> v(d.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.area_factor(g[i]) * d[i];
    return normalize(std::move(v), line);
  };
  require_same_grid(mu.grid(), nu.grid(), "w2_radial_profile");
  return w2_1d(profile(mu), profile(nu), quantile_nodes);
}

double monge_cost(const GridDensity& mu, const GridDensity& nu, std::size_t /*quantile_nodes*/) {
  require_line(mu, "monge_cost");
  require_line(nu, "monge_cost");
  const auto f_mu = cumulative_distribution(mu);
  const auto f_nu = cumulative_distribution(nu);
  const auto x = mu.grid().nodes();
  const auto y = nu.grid().nodes();
  std::vector<double> cost(mu.size());
  for (std::size_t i = 0; i < cost.size(); ++i) {
    const double t = invert_cdf(f_nu, y, f_mu[i]);
    cost[i] = (x[i] - t) * (x[i] - t) * mu[i];
  }
  return integrate(cost, mu.grid()) / mu.mass();
}

double monotone_coupling_cost(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("monotone_coupling_cost: atom counts differ");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

VelocityField continuity_velocity(const GridDensity& before, const GridDensity& after, double dt, double floor) {
  require_line(before, "continuity_velocity");
  require_same_grid(before.grid(), after.grid(), "continuity_velocity");
  if (!(dt > 0.0)) throw std::invalid_argument("continuity_velocity: dt must be > 0");
  const auto fb = cumulative_distribution(before);
  const auto fa = cumulative_distribution(after);
  std::vector<double> v(before.size(), 0.0);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rate = (fa[i] - fb[i]) / dt;
    const double mid = 0.5 * (before[i] + after[i]);
    if (mid < floor) {
      if (std::abs(rate) > floor) ++flagged;
      continue;
    }
    v[i] = -rate / mid;
  }
  return {TangentField(before.grid(), std::move(v)), flagged};
}

double otto_inner(const GridDensity& mu, const TangentField& phi, const TangentField& psi) {
  require_same_grid(mu.grid(), phi.grid, "otto_inner");
  require_same_grid(mu.grid(), psi.grid, "otto_inner");
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = phi.values[i] * psi.values[i] * mu[i];
  return integrate(s, mu.grid());
}

GridDensity mccann_geodesic(const GridDensity& mu, const GridDensity& nu, double s, std::size_t quantile_nodes) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("mccann_geodesic: s must lie in [0, 1]");
  require_line(mu, "mccann_geodesic");
  require_line(nu, "mccann_geodesic");
  const auto xm = cdf_and_quantile(mu, quantile_nodes);
  const auto xn = cdf_and_quantile(nu, quantile_nodes);
  std::vector<double> target(xm.size());
  for (std::size_t j = 0; j < target.size(); ++j) target[j] = (1.0 - s) * xm[j] + s * xn[j];
  return pushforward_monotone(mu, xm.values(), target);
}

DensityTrajectory mccann_path(const GridDensity& mu, const GridDensity& nu, std::size_t steps,
                              std::size_t quantile_nodes) {
  if (steps < 1) throw std::invalid_argument("mccann_path: need at least one step");
  DensityTrajectory path;
  path.solver = "mccann";
  path.step = 1.0 / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(steps);
    path.times.push_back(s);
    path.states.push_back(mccann_geodesic(mu, nu, s, quantile_nodes));
  }
  return path;
}

double path_action(const DensityTrajectory& path) {
  if (path.size() < 2) throw std::invalid_argument("path_action: need at least two snapshots");
  double action = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    const auto& a = path.states[k];
    const auto& b = path.states[k + 1];
    const auto vel = continuity_velocity(a, b, dt);
    std::vector<double> mid(a.size());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
    const GridDensity mid_density(a.grid(), std::move(mid));
    action += otto_inner(mid_density, vel.field, vel.field) * dt;
  }
  return action;
}

std::vector<double> integrate_potential(const TangentField& field) {
  const Grid& g = field.grid;
  const double h = g.spacing();
  std::vector<double> phi(field.values.size(), 0.0);
  for (std::size_t i = 1; i < phi.size(); ++i) phi[i] = phi[i - 1] + 0.5 * h * (field.values[i - 1] + field.values[i]);
  const double mean = integrate(phi, g) / (g.upper() - g.lower());
  for (double& p : phi) p -= mean;
  return phi;
}

double geodesic_hj_residual(const DensityTrajectory& path, double bulk) {
  if (path.size() < 3) throw std::invalid_argument("geodesic_hj_residual: need at least three snapshots");
  const std::size_t steps = path.size() - 1;
  std::vector<std::vector<double>> phi(steps);
  std::vector<std::vector<double>> vel(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double ds = path.times[k + 1] - path.times[k];
    auto v = continuity_velocity(path.states[k], path.states[k + 1], ds);
    phi[k] = integrate_potential(v.field);
    vel[k] = std::move(v.field.values);
  }
  double worst = 0.0;
  for (std::size_t k = 1; k < steps; ++k) {
    const auto& mu = path.states[k];
    const double ds = 0.5 * (path.times[k + 1] - path.times[k - 1]);
    const auto cdf = cumulative_distribution(mu);
    std::vector<double> res(mu.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double dphi = (phi[k][i] - phi[k - 1][i]) / ds;
      const double kinetic = 0.25 * (vel[k][i] * vel[k][i] + vel[k - 1][i] * vel[k - 1][i]);
      res[i] = dphi + kinetic;
      if (cdf[i] >= bulk && cdf[i] <= 1.0 - bulk) {
        num += res[i] * mu[i];
        den += mu[i];
      }
    }
    if (den <= 0.0) continue;
    const double kappa = num / den;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (cdf[i] >= bulk && cdf[i] <= 1.0 - bulk) worst = std::max(worst, std::abs(res[i] - kappa));
    }
  }
  return worst;
}

void write_geodesic_csv(std::ostream& out, const DensityTrajectory& path) {
  CsvWriter csv(out, {"s", "x", "value"});
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto x = path.states[k].grid().nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
      csv.cell(path.times[k]).cell(x[i]).cell(path.states[k][i]);
      csv.end_row();
    }
  }
}

}  // namespace entroflow
