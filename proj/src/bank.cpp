#include "entroflow/bank.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "entroflow/functionals.hpp"
#include "entroflow/pde_flows.hpp"
#include "entroflow/random.hpp"

namespace entroflow {

namespace {

constexpr std::array<double, 4> kFrequencies{1.0, 2.0, 4.0, 8.0};

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

std::vector<double> sample(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g[i]);
  return v;
}

std::vector<double> normalized(std::vector<double> v, const Grid& g) {
  const auto d = normalize(std::move(v), g);
  return {d.values().begin(), d.values().end()};
}

}  // namespace

std::vector<TestFunction> test_function_bank(std::uint64_t seed, std::size_t count, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("test_function_bank: empty interval");
  Rng rng(seed);
  const double half = 0.5 * (hi - lo);
  std::vector<TestFunction> bank;
  bank.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double c = rng.uniform(lo, hi);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double k = kFrequencies[rng.below(kFrequencies.size())];
    const double omega = k * std::numbers::pi / half;
    switch (i % 5) {
      case 0:
        bank.push_back({"affine", [=](double x) { return (x - c) / (2.0 * half); }});
        break;
      case 1:
        bank.push_back({"quadratic", [=](double x) { return (x - c) * (x - c) / (4.0 * half * half); }});
        break;
      case 2:
        bank.push_back({"sine", [=](double x) { return std::sin(omega * x + phase); }});
        break;
      case 3:
        bank.push_back({"cosine", [=](double x) { return std::cos(omega * x + phase); }});
        break;
      default: {
        const double w = rng.uniform(0.05, 0.3) * (hi - lo);
        bank.push_back({"bump", [=](double x) { return bump((x - c) / w); }});
      }
    }
  }
  return bank;
}

std::vector<TestFunction> radial_test_function_bank(std::uint64_t seed, std::size_t count, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radial_test_function_bank: radius must be > 0");
  Rng rng(seed);
  std::vector<TestFunction> bank;
  bank.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double k = kFrequencies[rng.below(kFrequencies.size())];
    const double w = rng.uniform(0.1, 0.6) * radius;
    switch (i % 4) {
      case 0:
        bank.push_back({"quadratic", [=](double r) { return r * r / (radius * radius); }});
        break;
      case 1:
        bank.push_back({"cosine", [=](double r) { return std::cos(k * std::numbers::pi * r / radius); }});
        break;
      case 2:
        bank.push_back({"bump", [=](double r) { return std::exp(-r * r / (w * w)); }});
        break;
      default:
        bank.push_back({"quartic", [=](double r) { return std::pow(r / radius, 4); }});
    }
  }
  return bank;
}

const char* to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::lsi: return "lsi";
    case InequalityKind::sobolev: return "sobolev";
    case InequalityKind::eep_fp: return "eep_fp";
    case InequalityKind::eep_fd: return "eep_fd";
    case InequalityKind::zugmeyer: return "zugmeyer";
  }
  return "?";
}

InequalityKind inequality_kind_from_string(const std::string& s) {
  for (auto k : {InequalityKind::lsi, InequalityKind::sobolev, InequalityKind::eep_fp, InequalityKind::eep_fd,
                 InequalityKind::zugmeyer})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown inequality '" + s + "' (expected lsi, sobolev, eep_fp, eep_fd or zugmeyer)");
}

FunctionBank lsi_bank(std::uint64_t seed, std::size_t count) {
  FunctionBank out{make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line), {}};
  const auto phis = test_function_bank(seed, count, -10.0, 10.0);
  Rng rng(seed ^ 0x5eedULL);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& phi = phis[i].f;
    if (i % 2 == 0) {
      const double a = rng.uniform(-1.5, 1.5);
      out.samples.push_back(sample(out.grid, [&](double x) { return std::exp(a * phi(x)); }));
    } else {
      const double b = rng.uniform(-0.9, 0.9);
      out.samples.push_back(sample(out.grid, [&](double x) { return 1.0 + b * phi(x); }));
    }
  }
  return out;
}

FunctionBank eep_fp_bank(std::uint64_t seed, std::size_t count) {
  FunctionBank out{make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line), {}};
  const auto phis = test_function_bank(seed, count, -10.0, 10.0);
  Rng rng(seed ^ 0xf0ULL);
  auto gauss = [](double x, double m, double s) { return std::exp(-0.5 * (x - m) * (x - m) / (s * s)) / s; };
  for (std::size_t i = 0; i < count; ++i) {
    const auto& phi = phis[i].f;
    std::vector<double> v;
    switch (i % 3) {
      case 0: {
        const double a = rng.uniform(-1.5, 1.5);
        v = sample(out.grid, [&](double x) { return gauss(x, 0.0, 1.0) * std::exp(a * phi(x)); });
        break;
      }
      case 1: {
        const double m1 = rng.uniform(-3.0, 3.0), m2 = rng.uniform(-3.0, 3.0);
        const double s1 = rng.uniform(0.5, 1.5), s2 = rng.uniform(0.5, 1.5);
        const double w = rng.uniform(0.1, 0.9);
        v = sample(out.grid, [&](double x) { return w * gauss(x, m1, s1) + (1.0 - w) * gauss(x, m2, s2); });
        break;
      }
      default: {
        const double m = rng.uniform(-3.0, 3.0);
        v = sample(out.grid, [&](double x) { return gauss(x, m, 1.0); });
      }
    }
    out.samples.push_back(normalized(std::move(v), out.grid));
  }
  return out;
}

FunctionBank eep_fd_bank(std::uint64_t seed, std::size_t count) {
  const int n = 3;
  FunctionBank out{make_uniform_grid(0.0, 10.0, 1001, n, Geometry::radial), {}};
  const auto phis = radial_test_function_bank(seed, count, 10.0);
  const double c = stationary_fd(n, out.grid).C;
  auto mu_inf = [&](double r) { return std::pow(c + 0.5 * r * r, -n); };
  Rng rng(seed ^ 0xfdULL);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& phi = phis[i].f;
    std::vector<double> v;
    switch (i % 3) {
      case 0: {
        const double a = rng.uniform(-1.5, 1.5);
        v = sample(out.grid, [&](double r) { return mu_inf(r) * std::exp(a * phi(r)); });
        break;
      }
      case 1: {
        const double lambda = rng.uniform(0.7, 1.4);
        v = sample(out.grid, [&](double r) { return mu_inf(lambda * r); });
        break;
      }
      default: {
        const double w = rng.uniform(0.1, 0.9);
        const double s = rng.uniform(0.5, 2.0);
        v = sample(out.grid, [&](double r) { return (1.0 - w) * mu_inf(r) + w * std::exp(-0.5 * r * r / (s * s)); });
      }
    }
    out.samples.push_back(normalized(std::move(v), out.grid));
  }
  return out;
}

FunctionBank sobolev_bank(std::uint64_t seed, std::size_t count) {
  FunctionBank out{make_uniform_grid(0.0, 200.0, 20000, 3, Geometry::radial), {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      const std::size_t terms = 1 + rng.below(3);
      std::vector<std::pair<double, double>> parts;
      for (std::size_t t = 0; t < terms; ++t) parts.emplace_back(rng.uniform(0.1, 1.0), rng.uniform(0.5, 20.0));
      out.samples.push_back(sample(out.grid, [&](double r) {
        double f = 0.0;
        for (const auto& [a, s] : parts) f += a * std::exp(-(r / s) * (r / s));
        return f;
      }));
    } else {
      const double s = rng.uniform(0.5, 20.0);
      const double b = rng.uniform(-0.9, 0.9);
      const double k = kFrequencies[rng.below(kFrequencies.size())];
      out.samples.push_back(
          sample(out.grid, [&](double r) { return std::exp(-(r / s) * (r / s)) * (1.0 + b * std::cos(k * r / s)); }));
    }
  }
  return out;
}

ZugmeyerProblem default_zugmeyer_problem(double C) {
  const Grid omega = make_uniform_grid(0.0, 1.0, 201, 1, Geometry::line);
  auto v = sample(omega, [](double x) { return std::exp(-4.0 * (x - 0.5) * (x - 0.5)); });
  return entropy_zugmeyer_problem(omega, std::move(v), C);
}

FunctionBank zugmeyer_bank(const ZugmeyerProblem& p, std::uint64_t seed, std::size_t count) {
  FunctionBank out{p.omega, {}};
  const auto phis = test_function_bank(seed, count, p.omega.lower(), p.omega.upper());
  const double mass_v = integrate(p.v, p.omega);
  Rng rng(seed ^ 0x2bULL);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> u(p.v.size());
    if (i % 2 == 0) {
      const double eps = rng.uniform(-0.5, 0.5);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = p.v[j] * (1.0 + eps * phis[i].f(p.omega[j]));
    } else {
      const double c = rng.uniform(0.1, 0.9);
      const double w = rng.uniform(0.02, 0.05);
      const double eps = rng.uniform(-0.9, 5.0);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = p.v[j] * (1.0 + eps * bump((p.omega[j] - c) / w));
    }
    const double scale = mass_v / integrate(u, p.omega);
    for (double& x : u) x *= scale;
    out.samples.push_back(std::move(u));
  }
  return out;
}

std::vector<InequalityCase> run_inequality_bank(InequalityKind kind, std::uint64_t seed, std::size_t count) {
  std::vector<InequalityCase> cases;
  cases.reserve(count);
  auto add = [&](double lhs, double rhs, bool pass) {
    cases.push_back({cases.size(), lhs, rhs, rhs - lhs, pass});
  };
  switch (kind) {
    case InequalityKind::lsi: {
      const auto bank = lsi_bank(seed, count);
      for (const auto& f : bank.samples) {
        const auto r = lsi_check(bank.grid, f);
        add(r.lhs, r.rhs, r.pass);
      }
      break;
    }
    case InequalityKind::sobolev: {
      const auto bank = sobolev_bank(seed, count);
      for (const auto& f : bank.samples) {
        const auto r = sobolev_check(bank.grid, f, 3);
        add(r.lhs_norm, r.lhs_norm / r.ratio_to_optimal, r.pass);
      }
      break;
    }
    case InequalityKind::eep_fp: {
      const auto bank = eep_fp_bank(seed, count);
      for (auto& v : bank.samples) {
        const auto r = eep_check_fp(GridDensity(bank.grid, v));
        add(r.lhs, r.rhs, r.pass);
      }
      break;
    }
    case InequalityKind::eep_fd: {
      const auto bank = eep_fd_bank(seed, count);
      for (auto& v : bank.samples) {
        const auto r = eep_check_fd(GridDensity(bank.grid, v), 3);
        add(r.lhs, r.rhs, r.pass);
      }
      break;
    }
    case InequalityKind::zugmeyer: {
      const auto p = default_zugmeyer_problem();
      const auto bank = zugmeyer_bank(p, seed, count);
      for (const auto& u : bank.samples) {
        const auto r = zugmeyer_check(p, u);
        add(r.lhs, r.rhs, r.pass);
      }
      break;
    }
  }
  return cases;
}

}  // namespace entroflow
