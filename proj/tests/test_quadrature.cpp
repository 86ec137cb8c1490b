#include <cmath>

#include "copred/normal.hpp"
#include "copred/quadrature.hpp"
#include "doctest.h"

using namespace copred;

TEST_CASE("quadrature is exact on low-degree polynomials") {
  for (int k = 0; k <= 10; ++k) {
    const auto r = integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    CHECK(r.converged);
  }
}

TEST_CASE("quadrature handles smooth transcendental integrands") {
  const auto s = integrate([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));

  const auto g = integrate([](double z) { return std_normal_pdf(z); }, -8.0, 8.0, 1e-12);
  CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature resolves an integrable endpoint singularity") {
  // nodes are interior, so log(0) is never evaluated; subdivision does the rest
  const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, 1e-10);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("quadrature respects orientation and empty intervals") {
  const auto fwd = integrate([](double x) { return x * x; }, 0.0, 2.0);
  const auto rev = integrate([](double x) { return x * x; }, 2.0, 0.0);
  CHECK(rev.value == doctest::Approx(-fwd.value).epsilon(1e-15));

  const auto none = integrate([](double x) { return x; }, 1.0, 1.0);
  CHECK(none.value == 0.0);
  CHECK(none.evaluations == 0);
}

TEST_CASE("quadrature reports its own error honestly on easy problems") {
  const auto r = integrate([](double x) { return std::exp(-x); }, 0.0, 5.0, 1e-10);
  CHECK(std::fabs(r.value - (1.0 - std::exp(-5.0))) <= std::max(r.error_estimate, 1e-12));
  CHECK(r.evaluations > 0);
}
