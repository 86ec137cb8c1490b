#include <cmath>
#include <stdexcept>
#include <vector>

#include "copred/copula.hpp"
#include "copred/exact.hpp"
#include "copred/quadrature.hpp"
#include "copred/rng.hpp"
#include "doctest.h"

using namespace copred;

namespace {

// cdf inversion by bisection, for round-trip checks
template <class Cdf>
double invert(Cdf cdf, double q, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("exponential predictive density and cdf closed forms") {
  CHECK(exp_predictive_pdf({1.0, 1}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exp_predictive_pdf({2.0, 2}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exp_predictive_cdf({1.0, 1}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exp_predictive_cdf({3.0, 4}, 0.0) == 0.0);
  CHECK_THROWS_AS(exp_predictive_pdf({1.0, 1}, -0.5), std::domain_error);
  CHECK_THROWS_AS(exp_predictive_cdf({1.0, 1}, -0.5), std::domain_error);

  // Nearly all mass sits in the first ~1e-3 of [0, 1e6]; integrate the head and the
  // tail separately so the adaptive rule cannot sample straight past the density.
  const ExponentialPredictive s{3.0, 4};
  const auto pdf = [&](double y) { return exp_predictive_pdf(s, y); };
  const double mass = integrate(pdf, 0.0, 1e3, 1e-9).value + integrate(pdf, 1e3, 1e6, 1e-9).value;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  const double y73 = invert([&](double y) { return exp_predictive_cdf(s, y); }, 0.73, 0.0, 1e9);
  CHECK(exp_predictive_cdf(s, y73) == doctest::Approx(0.73).epsilon(1e-10));
}

TEST_CASE("exponential absorption accumulates the running total") {
  ExponentialPredictive s{1.0, 1};
  s = exp_absorb(s, 2.5);
  CHECK(s.t == 3.5);
  CHECK(s.n == 2);
  CHECK_THROWS_AS(exp_absorb(s, -1.0), std::domain_error);
}

TEST_CASE("exponential update factors through the clayton copula") {
  // prior state, observation 1, evaluation at 0: both routes give density 1
  const auto [direct, via] = exp_copula_update_check({1.0, 1}, 1.0, 0.0);
  CHECK(direct == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(via == doctest::Approx(1.0).epsilon(1e-6));

  Rng rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    ExponentialPredictive s{1.0, 1};
    const int n = 1 + static_cast<int>(rng.bounded(20));
    for (int i = 1; i < n; ++i) s = exp_absorb(s, -std::log(1.0 - rng.uniform()));
    const double y_obs = -2.0 * std::log(1.0 - rng.uniform());
    const double y_eval = -2.0 * std::log(1.0 - rng.uniform());
    const auto [d, v] = exp_copula_update_check(s, y_obs, y_eval);
    worst = std::max(worst, std::fabs(d - v) / d);
    // the copula factor is symmetric in its two cdf arguments
    const double u1 = exp_predictive_cdf(s, y_eval), u2 = exp_predictive_cdf(s, y_obs);
    CHECK(clayton_copula_density(u1, u2, s.n) == clayton_copula_density(u2, u1, s.n));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("normal predictive closed forms") {
  // prior predictive with unit prior precision: mean 0, variance 2
  CHECK(normal_predictive_pdf({1.0, 0.0, 1}, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(4.0 * 3.14159265358979323846)).epsilon(1e-14));
  CHECK(normal_predictive_cdf({1.0, 0.0, 1}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));

  // predictive variance tightens to 1
  const NormalPredictive late{1.0, 0.0, 1000000};
  const double var = (late.n + late.tau) / (late.n - 1.0 + late.tau);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-5));

  NormalPredictive s{2.0, 0.0, 1};
  s = normal_absorb(s, 1.5);
  CHECK(s.t == 1.5);
  CHECK(s.n == 2);
  CHECK(normal_predictive_cdf(s, s.t / (s.n - 1.0 + s.tau)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normal update factors through the gaussian copula") {
  const auto [d0, v0] = normal_copula_update_check({1.0, 0.0, 1}, 0.0, 0.0);
  CHECK(d0 == doctest::Approx(v0).epsilon(1e-8));

  Rng rng(202);
  double worst = 0.0;
  for (double tau : {0.5, 1.0, 4.0}) {
    for (int rep = 0; rep < 34; ++rep) {
      NormalPredictive s{tau, 0.0, 1};
      const int n = 1 + static_cast<int>(rng.bounded(20));
      for (int i = 1; i < n; ++i) s = normal_absorb(s, rng.normal());
      const double y_obs = 2.0 * rng.normal();
      const double y_eval = 2.0 * rng.normal();
      const auto [d, v] = normal_copula_update_check(s, y_obs, y_eval);
      worst = std::max(worst, std::fabs(d - v) / d);
    }
  }
  CHECK(worst <= 1e-8);

  // the copula factor flattens to 1 as the correlation dies off
  const NormalPredictive big{1.0, 0.0, 1000000};
  const double rho = 1.0 / (big.n + big.tau);
  const double u = normal_predictive_cdf(big, 0.7);
  const double v = normal_predictive_cdf(big, -0.4);
  CHECK(std::fabs(gaussian_copula_density(u, v, rho) - 1.0) <= 1e-3);
}

TEST_CASE("multinomial predictive probabilities") {
  auto s = multinomial_make({1.0, 1.0});
  CHECK(multinomial_predictive(s, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(multinomial_predictive(s, 2) == doctest::Approx(0.5).epsilon(1e-15));

  const auto s1 = multinomial_absorb(s, 1);
  CHECK(multinomial_predictive(s1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(multinomial_predictive(s1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(multinomial_predictive(s, 0), std::out_of_range);
  CHECK_THROWS_AS(multinomial_predictive(s, 3), std::out_of_range);
  CHECK_THROWS_AS(multinomial_absorb(s, 5), std::out_of_range);

  // probabilities sum to one for random states
  Rng rng(7);
  auto r = multinomial_make({0.7, 1.3, 2.0, 0.4});
  for (int i = 0; i < 9; ++i) r = multinomial_absorb(r, 1 + static_cast<int>(rng.bounded(4)));
  double total = 0.0;
  for (int y = 1; y <= 4; ++y) total += multinomial_predictive(r, y);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("multinomial update ratio reproduces the posterior predictive") {
  const auto s = multinomial_make({1.0, 1.0});
  CHECK(multinomial_update_ratio(s, 1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(multinomial_update_ratio(s, 2, 1) < 1.0);

  // prior predictive times the ratio telescopes to the updated predictive,
  // and the reweighted masses still normalize
  Rng rng(8);
  auto r = multinomial_make({0.9, 1.7, 0.5});
  for (int i = 0; i < 6; ++i) r = multinomial_absorb(r, 1 + static_cast<int>(rng.bounded(3)));
  for (int y_obs = 1; y_obs <= 3; ++y_obs) {
    const auto after = multinomial_absorb(r, y_obs);
    double total = 0.0;
    for (int y = 1; y <= 3; ++y) {
      const double lifted = multinomial_predictive(r, y) * multinomial_update_ratio(r, y, y_obs);
      CHECK(lifted == doctest::Approx(multinomial_predictive(after, y)).epsilon(1e-14));
      total += lifted;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("multinomial cdf update equals the frechet mixture") {
  const auto s = multinomial_make({1.0, 1.0});
  const auto [direct, mixture] = multinomial_copula_cdf_check(s, 1, 1);
  CHECK(direct == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(mixture == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // the independence limit: a huge prior mass drives the singular weight to 0
  const auto flat = multinomial_make({5e8, 5e8});
  const auto [d_flat, m_flat] = multinomial_copula_cdf_check(flat, 1, 1);
  CHECK(m_flat == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(d_flat == doctest::Approx(m_flat).epsilon(1e-9));

  Rng rng(9);
  double worst = 0.0;
  for (int M = 2; M <= 6; ++M) {
    std::vector<double> alphas(M);
    for (double& a : alphas) a = 0.5 + 2.0 * rng.uniform();
    auto r = multinomial_make(alphas);
    for (int i = 0; i < 10; ++i) r = multinomial_absorb(r, 1 + static_cast<int>(rng.bounded(M)));
    for (int y = 1; y <= M; ++y) {
      for (int y_obs = 1; y_obs <= M; ++y_obs) {
        const auto [d, v] = multinomial_copula_cdf_check(r, y, y_obs);
        worst = std::max(worst, std::fabs(d - v));
      }
    }
  }
  CHECK(worst <= 1e-12);
}
