#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "copred/copula.hpp"
#include "copred/estimator.hpp"
#include "copred/exact.hpp"
#include "copred/normal.hpp"
#include "copred/rng.hpp"
#include "doctest.h"

using namespace copred;

namespace {

EstimatorConfig std_config() {
  EstimatorConfig cfg;
  cfg.init = normal_init(0.0, 1.0);
  return cfg;
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] < v[j - 1]) return false;
  return true;
}

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
  return s * h;
}

}  // namespace

TEST_CASE("init tabulates the starting cdf on the grid") {
  const GridSpec grid{-8.0, 8.0, 1001};
  const auto st = init_state(grid, std_config());
  CHECK(st.cdf[500] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(st.count == 0);
  CHECK(st.tail_hits == 0);
  CHECK(nondecreasing(st.cdf));
  CHECK(st.cdf.front() <= 1e-6);
  CHECK(st.cdf.back() >= 1.0 - 1e-6);
}

TEST_CASE("init rejects grids that miss starting mass") {
  EstimatorConfig cfg;
  cfg.init = cauchy_init(0.0, 1.0);
  try {
    init_state(GridSpec{-50.0, 50.0, 101}, cfg);
    FAIL("coverage error expected");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("coverage") != std::string::npos);
  }
  // the wider default window passes under the relaxed heavy-tail bound
  CHECK_NOTHROW(init_state(GridSpec{-500.0, 500.0, 257}, cfg));
}

TEST_CASE("data-matched init centers on the preview mean") {
  EstimatorConfig cfg;
  cfg.init = eb_normal_init(9.0);
  const std::vector<double> preview{20.0, 22.0};
  const auto st = init_state(GridSpec{6.0, 36.0, 301}, cfg, preview);
  CHECK(st.cdf[150] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(init_state(GridSpec{6.0, 36.0, 301}, cfg), std::invalid_argument);

  const InitSpec resolved = resolved_init(cfg.init, preview);
  CHECK(resolved.family == InitFamily::Normal);
  CHECK(resolved.center == doctest::Approx(21.0));
  CHECK(resolved.spread == doctest::Approx(9.0));
}

TEST_CASE("init validates grid and config up front") {
  CHECK_THROWS_AS(init_state(GridSpec{2.0, 1.0, 100}, std_config()), std::invalid_argument);
  CHECK_THROWS_AS(init_state(GridSpec{-8.0, 8.0, 8}, std_config()), std::invalid_argument);
  auto cfg = std_config();
  cfg.rho = 1.0;
  CHECK_THROWS_AS(init_state(GridSpec{-8.0, 8.0, 64}, cfg), std::invalid_argument);
  cfg = std_config();
  cfg.weight_a = 2.5;
  CHECK_THROWS_AS(init_state(GridSpec{-8.0, 8.0, 64}, cfg), std::invalid_argument);
}

TEST_CASE("an observation at the symmetry point leaves the middle fixed") {
  const GridSpec grid{-8.0, 8.0, 1025};  // dyadic step, exact midpoint node
  auto st = init_state(grid, std_config());
  absorb(st, 0.0, std_config());
  CHECK(st.cdf[512] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(st.count == 1);
}

TEST_CASE("an update moves cdf mass toward the observation") {
  const GridSpec grid{-8.0, 8.0, 1025};
  auto st = init_state(grid, std_config());
  const double before = interp_cdf(st, 2.5) - interp_cdf(st, 1.5);
  absorb(st, 2.0, std_config());
  const double after = interp_cdf(st, 2.5) - interp_cdf(st, 1.5);
  CHECK(after > before);
}

TEST_CASE("a vanishing step size freezes the state") {
  const GridSpec grid{-8.0, 8.0, 257};
  auto cfg = std_config();
  auto st = init_state(grid, cfg);
  const auto before = st.cdf;
  cfg.weight_a = 1e-12;
  absorb(st, 1.3, cfg);
  double worst = 0.0;
  for (std::size_t j = 0; j < before.size(); ++j)
    worst = std::max(worst, std::fabs(st.cdf[j] - before[j]));
  CHECK(worst <= 1e-11);
  CHECK(st.count == 1);
}

TEST_CASE("updates count out-of-window observations and reject non-finite ones") {
  const GridSpec grid{-8.0, 8.0, 129};
  auto st = init_state(grid, std_config());
  absorb(st, 9.5, std_config());
  CHECK(st.tail_hits == 1);
  CHECK(st.count == 1);
  absorb(st, 0.2, std_config());
  CHECK(st.tail_hits == 1);
  CHECK_THROWS_AS(absorb(st, std::nan(""), std_config()), std::invalid_argument);
  CHECK_THROWS_AS(absorb(st, INFINITY, std_config()), std::invalid_argument);
}

TEST_CASE("first update reproduces the conjugate normal posterior predictive") {
  // with a full first step and the matching correlation, one grid update is
  // exactly one Bayes update of the unit-precision normal model
  const GridSpec grid{-12.0, 12.0, 2401};
  EstimatorConfig cfg;
  cfg.rho = 0.5;       // 1/(n + tau) at n = 1, tau = 1
  cfg.weight_a = 2.0;  // alpha_1 = 1: full replacement
  cfg.init = normal_init(0.0, 2.0);  // the model's prior predictive
  auto st = init_state(grid, cfg);

  const double y1 = 0.7;
  absorb(st, y1, cfg);

  const NormalPredictive after = normal_absorb({1.0, 0.0, 1}, y1);
  double worst = 0.0;
  for (int j = 0; j < grid.m; ++j)
    worst = std::max(worst, std::fabs(st.cdf[j] - normal_predictive_cdf(after, grid.point(j))));
  CHECK(worst <= 1e-8);
}

TEST_CASE("updates preserve monotonicity and range over long streams") {
  const GridSpec grid{-8.0, 8.0, 513};
  auto st = init_state(grid, std_config());
  Rng rng(33);
  for (int i = 0; i < 300; ++i) absorb(st, 2.0 * rng.normal(), std_config());
  CHECK(st.count == 300);
  CHECK(nondecreasing(st.cdf));
  CHECK(st.cdf.front() >= 0.0);
  CHECK(st.cdf.back() <= 1.0);

  const auto d = density(st);
  CHECK(*std::min_element(d.begin(), d.end()) >= 0.0);
  const double span = st.cdf.back() - st.cdf.front();
  CHECK(trapezoid(d, grid.step()) == doctest::Approx(span).epsilon(1e-9));
}

TEST_CASE("interpolation agrees with stored values and extends flat") {
  const GridSpec grid{-8.0, 8.0, 257};
  const auto st = init_state(grid, std_config());
  CHECK(interp_cdf(st, grid.point(40)) == st.cdf[40]);
  const double mid = 0.5 * (grid.point(40) + grid.point(41));
  CHECK(interp_cdf(st, mid) == doctest::Approx(0.5 * (st.cdf[40] + st.cdf[41])).epsilon(1e-15));
  CHECK(interp_cdf(st, -100.0) == st.cdf.front());
  CHECK(interp_cdf(st, 100.0) == st.cdf.back());
}

TEST_CASE("density peaks where the starting law does") {
  const GridSpec grid{-8.0, 8.0, 4001};
  const auto st = init_state(grid, std_config());
  const auto d = density(st);
  CHECK(d[2000] == doctest::Approx(0.39894).epsilon(1e-4));
}

TEST_CASE("quantile inverts the interpolated cdf") {
  const GridSpec grid{-8.0, 8.0, 1001};
  const auto st = init_state(grid, std_config());
  CHECK(std::fabs(quantile(st, 0.5)) <= grid.step());
  CHECK(interp_cdf(st, quantile(st, 0.73)) == doctest::Approx(0.73).epsilon(1e-12));
  CHECK(std::fabs(quantile(st, 0.1) - (-1.2815515655)) <= 2.0 * grid.step());

  CHECK_THROWS_AS(quantile(st, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(st, 1.0), std::domain_error);
  try {
    quantile(st, 1e-20);  // below the achievable bottom of this grid
    FAIL("range error expected");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("achievable") != std::string::npos);
  }
}

TEST_CASE("mean integrates the fitted density") {
  EstimatorConfig cfg;
  cfg.init = normal_init(3.0, 1.0);
  const auto st = init_state(GridSpec{-5.0, 11.0, 2001}, cfg);
  CHECK(std::fabs(mean(st) - 3.0) <= 1e-3);

  const auto st0 = init_state(GridSpec{-8.0, 8.0, 2001}, std_config());
  CHECK(std::fabs(mean(st0)) <= 1e-3);

  // hand-tabulated unit-rate exponential cdf
  GridDistribution st_exp;
  st_exp.grid = GridSpec{0.0, 40.0, 4001};
  st_exp.cdf.resize(4001);
  for (int j = 0; j < 4001; ++j) st_exp.cdf[j] = 1.0 - std::exp(-st_exp.grid.point(j));
  CHECK(mean(st_exp) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sequence fitting: one observation is permutation-proof") {
  const GridSpec grid{-8.0, 8.0, 257};
  const std::vector<double> ys{0.3};
  const auto plain = fit_sequence(ys, grid, std_config(), 0, 1);
  const auto averaged = fit_sequence(ys, grid, std_config(), 5, 1);
  CHECK(plain.cdf == averaged.cdf);
  CHECK(plain.count == 1);
}

TEST_CASE("sequence fitting depends on data order") {
  const GridSpec grid{-8.0, 8.0, 257};
  const auto ab = fit_sequence(std::vector<double>{-2.0, 2.0}, grid, std_config(), 0, 1);
  const auto ba = fit_sequence(std::vector<double>{2.0, -2.0}, grid, std_config(), 0, 1);
  double diff = 0.0;
  for (int j = 0; j < grid.m; ++j) diff = std::max(diff, std::fabs(ab.cdf[j] - ba.cdf[j]));
  CHECK(diff > 1e-12);
}

TEST_CASE("permutation averaging stays inside the per-order envelope") {
  const GridSpec grid{-8.0, 8.0, 129};
  const std::vector<double> ys{-1.2, 0.4, 2.0};

  std::vector<double> lo(grid.m, 1.0), hi(grid.m, 0.0);
  std::vector<double> order{ys};
  std::sort(order.begin(), order.end());
  do {
    const auto st = fit_sequence(order, grid, std_config(), 0, 1);
    for (int j = 0; j < grid.m; ++j) {
      lo[j] = std::min(lo[j], st.cdf[j]);
      hi[j] = std::max(hi[j], st.cdf[j]);
    }
  } while (std::next_permutation(order.begin(), order.end()));

  const auto avg = fit_sequence(ys, grid, std_config(), 10, 5);
  CHECK(avg.count == 3);
  CHECK(nondecreasing(avg.cdf));
  for (int j = 0; j < grid.m; ++j) {
    CHECK(avg.cdf[j] >= lo[j] - 1e-12);
    CHECK(avg.cdf[j] <= hi[j] + 1e-12);
  }
}

TEST_CASE("sequence fitting is reproducible for a fixed seed") {
  const GridSpec grid{-8.0, 8.0, 129};
  Rng rng(4);
  std::vector<double> ys(25);
  for (double& y : ys) y = rng.normal();
  const auto a = fit_sequence(ys, grid, std_config(), 8, 42);
  const auto b = fit_sequence(ys, grid, std_config(), 8, 42);
  CHECK(a.cdf == b.cdf);
}

TEST_CASE("pair fitting starts from a product table") {
  const GridSpec grid{-6.0, 6.0, 33};  // dyadic step, exact nodes
  const auto st = bivariate_init_state(grid, grid, std_config());
  const auto uni = init_state(grid, std_config());
  for (int j = 0; j < grid.m; ++j)
    for (int k = 0; k < grid.m; ++k)
      CHECK(st.at(j, k) == doctest::Approx(uni.cdf[j] * uni.cdf[k]).epsilon(1e-15));
  CHECK(st.count == 0);
}

TEST_CASE("pair update blends the center cell toward the product of factors") {
  const GridSpec grid{-6.0, 6.0, 33};
  auto st = bivariate_init_state(grid, grid, std_config());
  REQUIRE(st.at(16, 16) == doctest::Approx(0.25).epsilon(1e-15));

  bivariate_absorb(st, 0.0, 0.0, std_config());
  const double h = gaussian_copula_conditional_cdf(0.25, 0.25, 0.95);
  const double expected = 0.5 * 0.25 + 0.5 * h * h;
  CHECK(st.at(16, 16) == doctest::Approx(expected).epsilon(1e-7));
  CHECK(st.count == 1);
}

TEST_CASE("pair update freezes under a vanishing step size") {
  const GridSpec grid{-6.0, 6.0, 33};
  auto cfg = std_config();
  auto st = bivariate_init_state(grid, grid, cfg);
  const auto before = st.cdf;
  cfg.weight_a = 1e-12;
  bivariate_absorb(st, 0.4, -0.9, cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    worst = std::max(worst, std::fabs(st.cdf[i] - before[i]));
  CHECK(worst <= 1e-11);
}

TEST_CASE("pair updates keep the table in range and the corners pinned") {
  const GridSpec grid{-6.0, 6.0, 65};
  auto st = bivariate_init_state(grid, grid, std_config());
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const double y = rng.normal();
    const double x = 0.5 * y + 0.8 * rng.normal();
    bivariate_absorb(st, y, x, std_config());
  }
  CHECK(st.count == 20);
  for (double c : st.cdf) {
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
  // a joint cdf must stay negligible at the lower corner and saturated at the
  // upper one; inflation here means update noise is leaking tail mass
  CHECK(st.at(0, 0) <= 1e-6);
  CHECK(st.at(grid.m - 1, grid.m - 1) >= 0.999);
  CHECK(st.mono_violations >= 0);
}

TEST_CASE("pair updates count tail pairs and reject non-finite ones") {
  const GridSpec grid{-6.0, 6.0, 33};
  auto st = bivariate_init_state(grid, grid, std_config());
  bivariate_absorb(st, 100.0, 0.0, std_config());
  CHECK(st.tail_hits == 1);
  CHECK_THROWS_AS(bivariate_absorb(st, std::nan(""), 0.0, std_config()), std::invalid_argument);
  CHECK_THROWS_AS(bivariate_absorb(st, 0.0, INFINITY, std_config()), std::invalid_argument);
}

TEST_CASE("init spec round trips through its text form") {
  for (const char* text : {"normal:0,1", "normal:2.5,9", "cauchy:0,1", "eb-normal:9"}) {
    const InitSpec spec = init_from_string(text);
    CHECK(init_from_string(init_to_string(spec)).family == spec.family);
  }
  CHECK_THROWS_AS(init_from_string("triangle:0,1"), std::invalid_argument);
  CHECK_THROWS_AS(init_from_string("normal:0"), std::invalid_argument);
  CHECK_THROWS_AS(init_from_string("normal:a,b"), std::invalid_argument);
}
