#include "entroflow/functionals.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace entroflow {

namespace {

void require_positive(const GridDensity& mu, const char* what) {
  if (!(mu.min_value() > 0.0))
    throw std::invalid_argument(std::string(what) + ": density must be strictly positive");
}

int fd_dimension(const FreeEnergyFunctional& f, const GridDensity& mu) {
  const int n = static_cast<int>(f.parameter());
  if (!mu.grid().radial() || mu.grid().dim() != n)
    throw std::invalid_argument("fd_free_energy: needs a radial grid in the functional's dimension");
  return n;
}

// Radial derivative pieces of a radial potential: ‖Hess Φ‖² and ΔΦ per node.
// Φ'/r is replaced by Φ''(0) at r = 0.
struct HessianPieces {
  std::vector<double> grad;
  std::vector<double> hess_norm2;
  std::vector<double> laplacian;
};

HessianPieces hessian_pieces(const Grid& grid, std::span<const double> phi) {
  HessianPieces p;
  p.grad = gradient_fd(phi, grid);
  const auto d2 = second_derivative_fd(phi, grid);
  const std::size_t n = grid.size();
  p.hess_norm2.resize(n);
  p.laplacian.resize(n);
  const double extra = grid.radial() ? static_cast<double>(grid.dim() - 1) : 0.0;
  const auto r = grid.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = extra == 0.0 ? 0.0 : (r[i] > 0.0 ? p.grad[i] / r[i] : d2[i]);
    p.hess_norm2[i] = d2[i] * d2[i] + extra * ratio * ratio;
    p.laplacian[i] = d2[i] + extra * ratio;
  }
  return p;
}

std::vector<double> laplacian(const Grid& grid, std::span<const double> f) {
  return hessian_pieces(grid, f).laplacian;
}

double weighted_integral(const GridDensity& mu, std::span<const double> g) {
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = g[i] * mu[i];
  return integrate(s, mu.grid());
}

}  // namespace

const char* to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::boltzmann_entropy: return "boltzmann_entropy";
    case FunctionalKind::fp_free_energy: return "fp_free_energy";
    case FunctionalKind::fd_free_energy: return "fd_free_energy";
    case FunctionalKind::lp_norm: return "lp_norm";
  }
  return "unknown";
}

FreeEnergyFunctional FreeEnergyFunctional::boltzmann_entropy() {
  return FreeEnergyFunctional(FunctionalKind::boltzmann_entropy, 0.0, 0.0);
}

FreeEnergyFunctional FreeEnergyFunctional::fp_free_energy() {
  return FreeEnergyFunctional(FunctionalKind::fp_free_energy, 1.0, 0.0);
}

FreeEnergyFunctional FreeEnergyFunctional::fd_free_energy(int n) {
  if (n < 2) throw std::invalid_argument("fd_free_energy: dimension must be >= 2");
  const double nn = static_cast<double>(n);
  return FreeEnergyFunctional(FunctionalKind::fd_free_energy, (nn - 1.0) / nn, nn);
}

FreeEnergyFunctional FreeEnergyFunctional::lp_norm(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("lp_norm: exponent must be > 1");
  return FreeEnergyFunctional(FunctionalKind::lp_norm, std::nullopt, p);
}

std::string FreeEnergyFunctional::name() const {
  std::string s = to_string(kind_);
  if (kind_ == FunctionalKind::fd_free_energy) s += "(" + std::to_string(static_cast<int>(parameter_)) + ")";
  if (kind_ == FunctionalKind::lp_norm) s += "(" + std::to_string(parameter_) + ")";
  return s;
}

FreeEnergyFunctional FreeEnergyFunctional::with_minimizer(GridDensity minimizer) const {
  if (std::abs(minimizer.mass() - 1.0) > 1e-8)
    throw std::invalid_argument("functional: minimizer must have unit mass");
  FreeEnergyFunctional out = *this;
  out.minimizer_ = std::move(minimizer);
  return out;
}

double value(const FreeEnergyFunctional& f, const GridDensity& mu) {
  const auto x = mu.grid().nodes();
  std::vector<double> s(mu.size());
  switch (f.kind()) {
    case FunctionalKind::boltzmann_entropy:
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = mu[i] * safe_log(mu[i]);
      return integrate(s, mu.grid());
    case FunctionalKind::fp_free_energy:
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = mu[i] * (safe_log(mu[i]) + 0.5 * x[i] * x[i]);
      return integrate(s, mu.grid());
    case FunctionalKind::fd_free_energy: {
      const double n = fd_dimension(f, mu);
      require_positive(mu, "fd_free_energy");
      const double c = (n - 1.0) / n;
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = -std::pow(mu[i], 1.0 - 1.0 / n) + c * 0.5 * x[i] * x[i] * mu[i];
      return integrate(s, mu.grid());
    }
    case FunctionalKind::lp_norm: {
      const double p = f.parameter();
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::pow(mu[i], p);
      return std::pow(integrate(s, mu.grid()), 1.0 / p);
    }
  }
  throw std::logic_error("value: unknown functional");
}

TangentField otto_gradient(const FreeEnergyFunctional& f, const GridDensity& mu) {
  const auto x = mu.grid().nodes();
  const std::size_t n = mu.size();
  std::vector<double> potential(n);
  double drift = 0.0;
  double scale = 1.0;
  switch (f.kind()) {
    case FunctionalKind::boltzmann_entropy:
    case FunctionalKind::fp_free_energy:
      require_positive(mu, "otto_gradient");
      for (std::size_t i = 0; i < n; ++i) potential[i] = std::log(mu[i]);
      drift = f.kind() == FunctionalKind::fp_free_energy ? 1.0 : 0.0;
      break;
    case FunctionalKind::fd_free_energy: {
      const double dim = fd_dimension(f, mu);
      require_positive(mu, "otto_gradient");
      for (std::size_t i = 0; i < n; ++i) potential[i] = -std::pow(mu[i], -1.0 / dim);
      drift = 1.0;
      scale = (dim - 1.0) / dim;
      break;
    }
    case FunctionalKind::lp_norm:
      throw std::invalid_argument("otto_gradient: not available for lp_norm");
  }
  auto g = gradient_fd(potential, mu.grid());
  for (std::size_t i = 0; i < n; ++i) g[i] = scale * (g[i] + drift * x[i]);
  return TangentField(mu.grid(), std::move(g));
}

double production(const FreeEnergyFunctional& f, const GridDensity& mu) {
  const auto g = otto_gradient(f, mu);
  std::vector<double> sq(g.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = g.values[i] * g.values[i];
  return weighted_integral(mu, sq);
}

double otto_norm_squared(const GridDensity& mu, std::span<const double> phi) {
  if (phi.size() != mu.size()) throw std::invalid_argument("otto_norm_squared: length mismatch");
  auto g = gradient_fd(phi, mu.grid());
  for (double& v : g) v *= v;
  return weighted_integral(mu, g);
}

double otto_hessian_quadform(const FreeEnergyFunctional& f, const GridDensity& mu,
                             std::span<const double> phi) {
  if (phi.size() != mu.size()) throw std::invalid_argument("otto_hessian_quadform: length mismatch");
  if (f.kind() == FunctionalKind::lp_norm)
    throw std::invalid_argument("otto_hessian_quadform: not available for lp_norm");
  const auto p = hessian_pieces(mu.grid(), phi);
  const double hess = weighted_integral(mu, p.hess_norm2);
  std::vector<double> grad2(p.grad.size());
  for (std::size_t i = 0; i < grad2.size(); ++i) grad2[i] = p.grad[i] * p.grad[i];
  const double metric = weighted_integral(mu, grad2);

  switch (f.kind()) {
    case FunctionalKind::boltzmann_entropy: return hess;
    case FunctionalKind::fp_free_energy: return hess + metric;
    case FunctionalKind::fd_free_energy: {
      const double n = fd_dimension(f, mu);
      std::vector<double> defect(p.grad.size());
      for (std::size_t i = 0; i < defect.size(); ++i)
        defect[i] = p.hess_norm2[i] - p.laplacian[i] * p.laplacian[i] / n;
      return weighted_integral(mu, defect) / n + (n - 1.0) / n * metric;
    }
    case FunctionalKind::lp_norm: break;
  }
  throw std::logic_error("otto_hessian_quadform: unknown functional");
}

IdentitySides hessian_identity_check(const GridDensity& mu, std::span<const double> phi) {
  if (phi.size() != mu.size()) throw std::invalid_argument("hessian_identity_check: length mismatch");
  const Grid& grid = mu.grid();
  const auto p = hessian_pieces(grid, phi);
  std::vector<double> grad2(p.grad.size());
  for (std::size_t i = 0; i < grad2.size(); ++i) grad2[i] = p.grad[i] * p.grad[i];
  const auto lap_grad2 = laplacian(grid, grad2);
  const auto grad_lap = gradient_fd(p.laplacian, grid);
  std::vector<double> bochner(grad2.size());
  for (std::size_t i = 0; i < bochner.size(); ++i) bochner[i] = 0.5 * lap_grad2[i] - p.grad[i] * grad_lap[i];
  return {weighted_integral(mu, bochner), weighted_integral(mu, p.hess_norm2)};
}

GridDensity standard_gaussian(const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-0.5 * grid[i] * grid[i]);
  return normalize(std::move(v), grid);
}

GridDensity gaussian(const Grid& grid, double mean, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be > 0");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = (grid[i] - mean) / sigma;
    v[i] = std::exp(-0.5 * z * z);
  }
  return normalize(std::move(v), grid);
}

}  // namespace entroflow
