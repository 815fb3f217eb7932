#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forest_spectra/maxent.hpp"
#include "forest_spectra/rng.hpp"

using namespace forest_spectra;

TEST_CASE("moment_integrals: beta = 0 gives uniform moments") {
  std::vector<double> beta;
  double xi = 0.0;
  auto m = moment_integrals(beta, 0.0, 1.0, 5, &xi);
  CHECK(xi == doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 0; j <= 5; ++j)
    CHECK(m[j] == doctest::Approx(1.0 / (j + 1)).epsilon(1e-12));
}

TEST_CASE("moment_integrals: beta = (1) partition is 1 - 1/e") {
  std::vector<double> beta{1.0};
  double xi = 0.0;
  auto m = moment_integrals(beta, 0.0, 1.0, 1, &xi);
  CHECK(xi == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  const double mean = (1.0 - 2.0 * std::exp(-1.0)) / (1.0 - std::exp(-1.0));
  CHECK(m[1] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("moment_integrals: huge multiplier stays finite and normalized") {
  std::vector<double> beta{200.0};
  double xi = 0.0;
  auto m = moment_integrals(beta, 0.0, 1.0, 3, &xi);
  for (double v : m) CHECK(std::isfinite(v));
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] > 0.0);
  CHECK(m[1] < 0.02);  // mass piles up near 0
}

TEST_CASE("maxent_fit: symmetric first moment gives beta = 0") {
  std::vector<double> target{0.5};
  MaxentModel model = maxent_fit(target, 0.0, 1.0);
  REQUIRE(model.converged);
  CHECK(std::abs(model.beta[0]) < 1e-8);
}

TEST_CASE("maxent_fit: uniform's own two moments give beta = (0,0)") {
  std::vector<double> target{0.5, 1.0 / 3.0};
  MaxentModel model = maxent_fit(target, 0.0, 1.0);
  REQUIRE(model.converged);
  CHECK(std::abs(model.beta[0]) < 1e-7);
  CHECK(std::abs(model.beta[1]) < 1e-7);
}

TEST_CASE("maxent_fit: truncated-exponential mean recovers beta = 1") {
  const double mean = (1.0 - 2.0 * std::exp(-1.0)) / (1.0 - std::exp(-1.0));
  std::vector<double> target{mean};
  MaxentModel model = maxent_fit(target, 0.0, 1.0);
  REQUIRE(model.converged);
  CHECK(model.beta[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tail probabilities: uniform and truncated exponential") {
  std::vector<double> half{0.5};
  MaxentModel uniform = maxent_fit(half, 0.0, 1.0);
  CHECK(uniform.tail(0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(uniform.tail(0.0) == doctest::Approx(1.0));
  CHECK(uniform.tail(1.0) == doctest::Approx(0.0));

  const double mean = (1.0 - 2.0 * std::exp(-1.0)) / (1.0 - std::exp(-1.0));
  std::vector<double> target{mean};
  MaxentModel expo = maxent_fit(target, 0.0, 1.0);
  const double expect =
      (std::exp(-0.5) - std::exp(-1.0)) / (1.0 - std::exp(-1.0));
  CHECK(expo.tail(0.5) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<double> beta(k), target(k);
    for (double& b : beta) b = 6.0 * (rng.uniform() - 0.5);
    for (int j = 0; j < k; ++j) target[j] = rng.uniform();
    auto objective = [&](const std::vector<double>& b) {
      double part = 0.0;
      moment_integrals(b, 0.0, 1.0, 0, &part);
      double f = std::log(part);
      for (int j = 0; j < k; ++j) f += b[j] * target[j];
      return f;
    };
    auto mom = moment_integrals(beta, 0.0, 1.0, k);
    const double h = 1e-6;
    for (int j = 0; j < k; ++j) {
      std::vector<double> up = beta, dn = beta;
      up[j] += h;
      dn[j] -= h;
      const double fd = (objective(up) - objective(dn)) / (2.0 * h);
      const double analytic = target[j] - mom[j + 1];
      CHECK(std::abs(fd - analytic) <=
            1e-5 * std::max({std::abs(fd), std::abs(analytic), 1e-3}));
    }
  }
}

TEST_CASE("converged fits reproduce their target moments to 1e-7") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(3));
    std::vector<double> beta(k);
    for (double& b : beta) b = 4.0 * (rng.uniform() - 0.5);
    auto mom = moment_integrals(beta, 0.0, 1.0, k);
    std::vector<double> target(mom.begin() + 1, mom.end());
    MaxentModel model = maxent_fit(target, 0.0, 1.0);
    REQUIRE(model.converged);
    for (int j = 1; j <= k; ++j)
      CHECK(std::abs(model.moment(j) - target[j - 1]) < 1e-7);
  }
}

TEST_CASE("round-trip: moments of nu_beta recover beta to 1e-5") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(3));
    std::vector<double> beta(k);
    for (double& b : beta) b = 3.0 * (rng.uniform() - 0.5);
    auto mom = moment_integrals(beta, 0.0, 1.0, k);
    std::vector<double> target(mom.begin() + 1, mom.end());
    MaxentModel model = maxent_fit(target, 0.0, 1.0);
    REQUIRE(model.converged);
    for (int j = 0; j < k; ++j)
      CHECK(model.beta[j] == doctest::Approx(beta[j]).epsilon(1e-5));
  }
}

TEST_CASE("general interval: multipliers live in rescaled coordinates") {
  // uniform on [2,6]: m1 = 4, m2 = 52/3
  std::vector<double> target{4.0, 52.0 / 3.0};
  MaxentModel model = maxent_fit(target, 2.0, 6.0);
  REQUIRE(model.converged);
  CHECK(std::abs(model.beta[0]) < 1e-6);
  CHECK(std::abs(model.beta[1]) < 1e-6);
  CHECK(model.tail(4.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(model.moment(1) == doctest::Approx(4.0));
  CHECK(model.moment(2) == doctest::Approx(52.0 / 3.0));
}

TEST_CASE("iteration cap reports non-convergence without throwing") {
  // a feasible but extreme target with a tiny iteration budget
  std::vector<double> target{0.97};
  MaxentModel model = maxent_fit(target, 0.0, 1.0, {}, /*max_iter=*/1);
  CHECK(!model.converged);
  CHECK(model.iterations <= 1);
}

TEST_CASE("warm start reduces iterations") {
  std::vector<double> target{0.85};
  MaxentModel cold = maxent_fit(target, 0.0, 1.0);
  REQUIRE(cold.converged);
  std::vector<double> target2{0.84};
  MaxentModel warm = maxent_fit(target2, 0.0, 1.0, cold.beta);
  REQUIRE(warm.converged);
  MaxentModel cold2 = maxent_fit(target2, 0.0, 1.0);
  CHECK(warm.iterations <= cold2.iterations);
}
