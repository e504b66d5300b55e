#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "entroflow/bank.hpp"
#include "entroflow/inequalities.hpp"
#include "entroflow/pde_flows.hpp"

using namespace entroflow;

namespace {

const Grid& line_grid() {
  static const Grid g = make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line);
  return g;
}

std::vector<double> sample(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g[i]);
  return v;
}

const Grid& sobolev_grid() {
  static const Grid g = make_uniform_grid(0.0, 200.0, 20000, 3, Geometry::radial);
  return g;
}

}  // namespace

TEST_CASE("tolerance scales with the right-hand side") {
  CHECK(inequality_tolerance(0.5) == 1e-6);
  CHECK(inequality_tolerance(-300.0) == doctest::Approx(3e-4));
}

TEST_CASE("log-Sobolev examples") {
  const auto& g = line_grid();
  const auto one = lsi_check(g, std::vector<double>(g.size(), 1.0));
  CHECK(std::abs(one.lhs) <= 1e-12);
  CHECK(std::abs(one.rhs) <= 1e-12);
  CHECK(one.pass);

  const double a = 0.7;
  const auto ex = lsi_check(g, sample(g, [a](double x) { return std::exp(a * x); }));
  const double exact = 0.5 * a * a * std::exp(0.5 * a * a);
  CHECK(ex.lhs == doctest::Approx(exact).epsilon(1e-4));
  CHECK(ex.rhs == doctest::Approx(exact).epsilon(1e-4));
  CHECK(ex.ratio >= 1.0 - 1e-3);
  CHECK(ex.ratio <= 1.0);
  CHECK(ex.pass);

  const auto wave = lsi_check(g, sample(g, [](double x) { return 1.0 + 0.5 * std::sin(x); }));
  CHECK(wave.ratio < 1.0);
  CHECK(wave.pass);

  CHECK_THROWS_AS(lsi_check(g, sample(g, [](double x) { return x; })), std::invalid_argument);
}

TEST_CASE("Sobolev constant from the extremal matches the closed form") {
  // K(3) = (3π)^{-1/2} (Γ(3)/Γ(3/2))^{1/3}; the ball of radius 200 truncates
  // the gradient tail by O(1/R).
  const double closed = std::pow(3.0 * std::numbers::pi, -0.5) * std::cbrt(2.0 / std::tgamma(1.5));
  const double c = sobolev_constant(3, 200.0, sobolev_oracle_resolution(sobolev_grid().size()));
  CHECK(c == doctest::Approx(closed).epsilon(1e-2));
  CHECK_THROWS_AS(sobolev_constant(2, 10.0, 1000), std::invalid_argument);
}

TEST_CASE("Sobolev examples") {
  const auto& g = sobolev_grid();
  // The extremal decays only like 1/r, so its boundary value is 1/200 of the peak.
  const auto ext = sobolev_check(g, sobolev_extremal(g, 3), 3, 1e-2);
  CHECK(ext.ratio_to_optimal == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(ext.ratio_to_optimal >= 0.99);
  CHECK(ext.ratio_to_optimal <= 1.001);
  CHECK(ext.pass);

  const auto scaled = sobolev_check(g, sobolev_extremal(g, 3, 2.0), 3, 1e-2);
  CHECK(scaled.ratio_to_optimal == doctest::Approx(ext.ratio_to_optimal).epsilon(1e-2));

  const auto bump = sobolev_check(g, sample(g, [](double r) { return std::exp(-r * r / 4.0); }), 3);
  CHECK(bump.ratio_to_optimal < 1.0);
  CHECK(bump.pass);

  CHECK_THROWS_AS(sobolev_check(g, sobolev_extremal(g, 3), 3), std::invalid_argument);
  CHECK_THROWS_AS(sobolev_check(line_grid(), std::vector<double>(line_grid().size(), 1.0), 3), std::invalid_argument);
}

TEST_CASE("Fokker-Planck entropy-production examples") {
  const auto& g = line_grid();
  const auto at_gamma = eep_check_fp(standard_gaussian(g));
  CHECK(std::abs(at_gamma.lhs) <= 1e-12);
  CHECK(std::abs(at_gamma.rhs) <= 1e-12);
  CHECK(at_gamma.pass);

  for (double m : {0.5, 1.0, 2.0}) {
    const auto r = eep_check_fp(gaussian(g, m, 1.0));
    CHECK(r.lhs == doctest::Approx(0.5 * m * m).epsilon(1e-5));
    CHECK(r.rhs == doctest::Approx(0.5 * m * m).epsilon(1e-5));
    CHECK(r.equality);
    CHECK(r.pass);
  }

  std::vector<double> mix(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    mix[i] = std::exp(-0.5 * (g[i] - 2.0) * (g[i] - 2.0)) + std::exp(-0.5 * (g[i] + 1.0) * (g[i] + 1.0));
  const auto r = eep_check_fp(normalize(mix, g));
  CHECK(r.lhs < r.rhs);
  CHECK_FALSE(r.equality);
  CHECK(r.pass);
}

TEST_CASE("fast-diffusion entropy-production examples") {
  const Grid r = make_uniform_grid(0.0, 10.0, 1001, 3, Geometry::radial);
  const auto mu_inf = stationary_fd(3, r).density;
  const auto rest = eep_check_fd(mu_inf, 3);
  CHECK(std::abs(rest.lhs) <= 1e-12);
  CHECK(std::abs(rest.rhs) <= 1e-12);
  CHECK(rest.equality);

  std::vector<double> dilated(r.size()), bumped(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    dilated[i] = std::pow(stationary_fd(3, r).C + 0.5 * (r[i] / 1.2) * (r[i] / 1.2), -3.0);
    bumped[i] = mu_inf[i] * (1.0 + 0.8 * std::exp(-4.0 * (r[i] - 1.5) * (r[i] - 1.5)));
  }
  for (const auto& v : {dilated, bumped}) {
    const auto e = eep_check_fd(normalize(v, r), 3);
    CHECK(e.lhs > 0.0);
    CHECK(e.rhs > 0.0);
    CHECK(e.lhs <= e.rhs);
    CHECK(e.pass);
  }
  CHECK_THROWS_AS(eep_check_fd(standard_gaussian(line_grid()), 3), std::invalid_argument);
}

TEST_CASE("Zugmeyer examples") {
  const auto p = default_zugmeyer_problem();
  const auto same = zugmeyer_check(p, p.v);
  CHECK(std::abs(same.lhs) <= 1e-14);
  CHECK(std::abs(same.rhs) <= 1e-14);
  CHECK(same.pass);
  CHECK(same.hypotheses.ok());

  const double mass = integrate(p.v, p.omega);
  std::vector<double> u(p.v.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = p.v[i] * (1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * p.omega[i]));
  const double scale = mass / integrate(u, p.omega);
  for (auto& x : u) x *= scale;
  const auto smooth = zugmeyer_check(p, u);
  CHECK(smooth.lhs > 0.0);
  CHECK(smooth.lhs <= smooth.rhs);
  CHECK(smooth.pass);

  for (std::size_t i = 0; i < u.size(); ++i) u[i] = p.v[i] * (1.0 + 2.0 * std::exp(-std::pow((p.omega[i] - 0.3) / 0.04, 2)));
  const double s2 = mass / integrate(u, p.omega);
  for (auto& x : u) x *= s2;
  const auto local = zugmeyer_check(p, u);
  CHECK(local.lhs > 0.0);
  CHECK(local.rhs - local.lhs > 0.0);
  CHECK(local.pass);
}

TEST_CASE("Zugmeyer refuses unverified hypotheses") {
  auto p = default_zugmeyer_problem(8.5);
  try {
    zugmeyer_check(p, p.v);
    FAIL("expected a hypothesis violation");
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("-Hess Psi(v) >= C fails") != std::string::npos);
  }

  auto shifted = default_zugmeyer_problem();
  shifted.H = [](double x) { return x * std::log(x) + 1.0; };
  CHECK_THROWS_AS(zugmeyer_check(shifted, shifted.v), HypothesisViolation);

  const auto q = default_zugmeyer_problem();
  std::vector<double> heavier(q.v);
  for (auto& x : heavier) x *= 1.01;
  CHECK_THROWS_AS(zugmeyer_check(q, heavier), std::invalid_argument);
}

TEST_CASE("checkers are sensitive on equality cases") {
  const auto& g = line_grid();
  const auto ex = lsi_check(g, sample(g, [](double x) { return std::exp(0.7 * x); }));
  CHECK(ex.lhs > 0.9 * ex.rhs + inequality_tolerance(0.9 * ex.rhs));
  const auto fp = eep_check_fp(gaussian(g, 1.0, 1.0));
  CHECK(fp.lhs > 0.9 * fp.rhs + inequality_tolerance(0.9 * fp.rhs));
  const auto& sg = sobolev_grid();
  const auto sob = sobolev_check(sg, sobolev_extremal(sg, 3), 3, 1e-2);
  CHECK(sob.ratio_to_optimal / 0.9 > 1.0 + 1e-3);
}

TEST_CASE("inequality csv") {
  std::ostringstream out;
  write_inequality_csv(out, {{0, 0.1, 0.2, 0.1, true}, {1, 0.3, 0.2, -0.1, false}});
  CHECK(out.str().rfind("case_id,lhs,rhs,margin,pass\n", 0) == 0);
  CHECK(out.str().find("\n1,") != std::string::npos);
}
