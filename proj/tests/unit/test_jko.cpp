#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "entroflow/jko.hpp"
#include "entroflow/wasserstein.hpp"

using namespace entroflow;

namespace {

const Grid& line_grid() {
  static const Grid g = make_uniform_grid(-10.0, 10.0, 2001, 1, Geometry::line);
  return g;
}

}  // namespace

TEST_CASE("config validation") {
  JkoConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.M = 32;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.K = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("the Gaussian is a fixed point of the Fokker-Planck step") {
  const auto& g = line_grid();
  const auto fp = FreeEnergyFunctional::fp_free_energy();
  const auto gamma = standard_gaussian(g);
  JkoConfig cfg;
  cfg.M = 4000;
  const auto next = jko_step(fp, gamma, cfg);
  CHECK(std::abs(next.mass() - 1.0) <= 1e-12);
  CHECK(next.min_value() > 0.0);
  // The sampled Gaussian quantile is not exactly stationary for the discrete
  // objective: the extreme quantiles move by a few 1e-3, so the L¹ gap
  // shrinks only slowly with M.
  CHECK(l1_distance(next, gamma) <= 1e-4);
  cfg.M = 64000;
  CHECK(l1_distance(jko_step(fp, gamma, cfg), gamma) <= 2e-5);

  // The minimiser of the discrete objective, reached by long steps, is an
  // exact fixed point.
  cfg.M = 4000;
  cfg.tau = 10.0;
  auto rest = cdf_and_quantile(gamma, cfg.M);
  for (int k = 0; k < 20; ++k) rest = jko_quantile_step(fp, rest, cfg).X;
  cfg.tau = 0.02;
  const auto again = jko_quantile_step(fp, rest, cfg).X;
  for (std::size_t j = 0; j < rest.size(); ++j) CHECK(std::abs(again[j] - rest[j]) <= 1e-10);
}

TEST_CASE("one entropy step adds about 2τ to the variance") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.M = 4000;
  for (double tau : {0.04, 0.02, 0.01}) {
    cfg.tau = tau;
    const auto next = jko_step(FreeEnergyFunctional::boltzmann_entropy(), gaussian(g, 0.0, 1.0), cfg);
    // The implicit step gives σ² with σ²(σ² − 1) = 2τσ², i.e. 1 + 2τ up to O(τ²).
    CHECK(std::abs(variance(next) - (1.0 + 2.0 * tau)) <= 5.0 * tau * tau + 1e-4);
  }
}

TEST_CASE("the inner solve decreases the proximal objective") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.tau = 0.05;
  const auto x = cdf_and_quantile(gaussian(g, 1.0, 0.6), cfg.M);
  for (const auto& f : {FreeEnergyFunctional::boltzmann_entropy(), FreeEnergyFunctional::fp_free_energy()}) {
    const auto r = jko_quantile_step(f, x, cfg);
    CHECK(r.objective_end <= r.objective_start);
    CHECK(r.iterations >= 1);
    for (std::size_t j = 1; j < r.X.size(); ++j) CHECK(r.X[j] > r.X[j - 1]);
  }
}

TEST_CASE("unsupported functionals and inputs are rejected") {
  const auto& g = line_grid();
  const JkoConfig cfg;
  CHECK_THROWS_AS(jko_step(FreeEnergyFunctional::lp_norm(2.0), standard_gaussian(g), cfg), std::invalid_argument);
  const Grid r = make_uniform_grid(0.0, 5.0, 51, 3, Geometry::radial);
  CHECK_THROWS_AS(jko_step(FreeEnergyFunctional::boltzmann_entropy(), standard_gaussian(r), cfg),
                  std::invalid_argument);
}

TEST_CASE("pool adjacent violators") {
  const std::vector<double> y{1.0, 3.0, 2.0, 4.0, 0.0};
  const auto fit = pool_adjacent_violators(y);
  const std::vector<double> expected{1.0, 2.25, 2.25, 2.25, 2.25};
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(fit[i] == doctest::Approx(expected[i]));
  const std::vector<double> sorted{0.0, 1.0, 2.0};
  const auto same = pool_adjacent_violators(sorted);
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(same[i] == sorted[i]);
}

TEST_CASE("trajectory from the minimiser stays put") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.K = 5;
  cfg.M = 4000;
  const auto run = jko_trajectory(FreeEnergyFunctional::fp_free_energy(), standard_gaussian(g), cfg);
  CHECK(run.trajectory.size() == 6);
  for (const auto& s : run.trajectory.states) CHECK(l1_distance(s, run.trajectory.states.front()) <= 1e-4);
}

TEST_CASE("entropy trajectory follows σ0² + 2kτ") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.tau = 0.02;
  cfg.K = 25;
  cfg.M = 2000;
  const auto run = jko_trajectory(FreeEnergyFunctional::boltzmann_entropy(), gaussian(g, 0.0, 1.0), cfg);
  CHECK(run.energy_increases == 0);
  CHECK(run.step_control_failures == 0);
  for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
    const double t = run.trajectory.times[k];
    CHECK(std::abs(variance(run.trajectory.states[k]) - (1.0 + 2.0 * t)) <= 2.0 * cfg.tau * t + 2e-3);
  }
}

TEST_CASE("Fokker-Planck trajectory: monotone energy and first-order agreement with the PDE") {
  const auto& g = line_grid();
  const auto fp = FreeEnergyFunctional::fp_free_energy();
  double prev_gap = 1.0;
  for (double tau : {0.04, 0.02}) {
    JkoConfig cfg;
    cfg.tau = tau;
    cfg.K = static_cast<std::size_t>(std::llround(0.5 / tau));
    cfg.M = 2000;
    const auto run = jko_trajectory(fp, gaussian(g, 1.5, 1.0), cfg);
    CHECK(run.energy_increases == 0);
    CHECK(run.step_control_failures == 0);
    for (const auto& s : run.trajectory.states) {
      CHECK(std::abs(s.mass() - 1.0) <= 1e-8);
      CHECK(s.min_value() > 0.0);
    }
    for (std::size_t k = 1; k < run.log.size(); ++k) CHECK(run.log[k].F <= run.log[k - 1].F + 1e-9);
    const auto cmp = compare_with_pde(fp, run, tau, 1e-3);
    CHECK(cmp.max_gap < prev_gap);
    prev_gap = cmp.max_gap;
  }
  CHECK(prev_gap <= 0.02);
}

TEST_CASE("PDE comparison needs a dividing step") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.K = 2;
  const auto run = jko_trajectory(FreeEnergyFunctional::fp_free_energy(), gaussian(g, 1.0, 1.0), cfg);
  CHECK_THROWS_AS(compare_with_pde(FreeEnergyFunctional::fp_free_energy(), run, cfg.tau, 3e-3), std::invalid_argument);
}

TEST_CASE("log csv") {
  const auto& g = line_grid();
  JkoConfig cfg;
  cfg.K = 3;
  const auto run = jko_trajectory(FreeEnergyFunctional::boltzmann_entropy(), standard_gaussian(g), cfg);
  std::ostringstream out;
  write_jko_log_csv(out, run);
  CHECK(out.str().rfind("k,F,W2_step,inner_iters\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : out.str()) lines += c == '\n';
  CHECK(lines == 5);
}
