#include <cmath>
#include <limits>
#include <stdexcept>

#include "copred/normal.hpp"
#include "doctest.h"
#include "oracle_erf.hpp"

using namespace copred;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("normal cdf matches the series/continued-fraction reference") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(kInf) == 1.0);
  CHECK(std_normal_cdf(-kInf) == 0.0);
  CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048).epsilon(1e-9));

  double max_err = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.01) {
    const double ref = static_cast<double>(oracle::phi(z));
    max_err = std::max(max_err, std::fabs(std_normal_cdf(z) - ref));
  }
  CHECK(max_err <= 1e-14);
}

TEST_CASE("normal cdf is monotone and symmetric") {
  double prev = -1.0;
  for (double z = -10.0; z <= 10.0; z += 0.05) {
    const double p = std_normal_cdf(z);
    CHECK(p >= prev);
    prev = p;
  }
  for (double z : {0.1, 0.5, 1.0, 1.5}) {
    CHECK(std::fabs(std_normal_cdf(-z) - (1.0 - std_normal_cdf(z))) <= 2e-16);
  }
}

TEST_CASE("normal quantile self-consistency across the full domain") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(0.0) == -kInf);
  CHECK(std_normal_quantile(1.0) == kInf);
  CHECK(std_normal_quantile(0.9750021048) == doctest::Approx(1.96).epsilon(1e-8));

  const double us[] = {1e-300, 1e-100, 1e-30, 1e-16, 1e-12, 1e-10, 1e-6, 1e-3,
                       0.01,   0.1,    0.25,  0.5,   0.75,  0.9,   0.99, 0.999,
                       1.0 - 1e-6, 1.0 - 1e-10, 1.0 - 1e-12, 1.0 - 1e-16};
  for (double u : us) {
    const double z = std_normal_quantile(u);
    CHECK(std::fabs(std_normal_cdf(z) - u) <= 1e-12);
  }
  // Round trip on the z scale. Above z ~ 5.3 the round trip is limited by the
  // representation, not the algorithm: cdf values near 1 quantize in steps of
  // ulp(1) = 2^-52, which maps back to a z error of about ulp(1)/pdf(z) (~1e-2
  // at z = 8). The lower tail keeps full relative precision, so it gets the
  // tight bound all the way down.
  double max_err = 0.0;
  for (double z = -8.0; z <= 5.2; z += 0.013) {
    max_err = std::max(max_err, std::fabs(std_normal_quantile(std_normal_cdf(z)) - z));
  }
  CHECK(max_err <= 1e-9);
  for (double z = 5.2; z <= 8.0; z += 0.013) {
    const double err = std::fabs(std_normal_quantile(std_normal_cdf(z)) - z);
    const double quantization = 1.5 * 0x1p-52 / std_normal_pdf(z);
    CHECK(err <= std::max(1e-9, quantization));
  }
}

TEST_CASE("normal quantile matches the bisection reference") {
  for (double u : {1e-8, 1e-4, 0.02, 0.3, 0.5, 0.7, 0.98, 1.0 - 1e-4}) {
    const double ref = static_cast<double>(oracle::phi_inv(u));
    CHECK(std_normal_quantile(u) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("normal quantile rejects values outside [0,1]") {
  CHECK_THROWS_AS(std_normal_quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.1), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("fast quantile path stays within its advertised error") {
  // the uncorrected rational approximation is only used where ~1e-9 is enough
  for (double u : {1e-300, 1e-20, 1e-9, 0.001, 0.02425, 0.3, 0.5}) {
    const double fast = detail::std_normal_quantile_fast(u);
    const double ref = static_cast<double>(oracle::phi_inv(u));
    CHECK(std::fabs(fast - ref) <= 1e-6 * (1.0 + std::fabs(ref)));
  }
}

TEST_CASE("normal pdf values and symmetry") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
  CHECK(std_normal_pdf(kInf) == 0.0);
  CHECK(std_normal_pdf(-kInf) == 0.0);
  for (double z : {0.3, 1.0, 2.5, 6.0}) CHECK(std_normal_pdf(z) == std_normal_pdf(-z));
  // peak at the origin
  CHECK(std_normal_pdf(0.0) > std_normal_pdf(0.01));
}

TEST_CASE("bivariate normal density closed forms") {
  const double two_pi = 2.0 * 3.14159265358979323846;
  CHECK(bivariate_normal_pdf(0, 0, 0) == doctest::Approx(1.0 / two_pi).epsilon(1e-14));
  CHECK(bivariate_normal_pdf(0, 0, 0.95) ==
        doctest::Approx(1.0 / (two_pi * std::sqrt(1.0 - 0.95 * 0.95))).epsilon(1e-14));
  for (double z1 : {-1.3, 0.4}) {
    for (double z2 : {-0.2, 2.1}) {
      CHECK(bivariate_normal_pdf(z1, z2, 0.0) ==
            doctest::Approx(std_normal_pdf(z1) * std_normal_pdf(z2)).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(bivariate_normal_pdf(0, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bivariate_normal_pdf(0, 0, -1.0), std::domain_error);
}
