#pragma once

// Standard normal cdf, pdf and quantile. Every copula evaluation in this
// library funnels through these, so they are header-only and inlineable.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace copred {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;

inline double std_normal_pdf(double z) {
  return inv_sqrt2pi * std::exp(-0.5 * z * z);
}

inline double std_normal_cdf(double z) {
  // erfc keeps full relative accuracy in the lower tail; the upper tail
  // saturates at 1 in double precision around z = 8.3, which is fine here.
  return 0.5 * std::erfc(-z * inv_sqrt2);
}

namespace detail {

// Rational approximation to the normal quantile (Acklam's coefficients),
// |relative error| < 1.2e-9 over (0,1). Used as-is in grid update loops,
// where the error is far below the grid discretization error, and as the
// starting point for the refined public quantile.
inline double std_normal_quantile_fast(double p) {
  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  static constexpr double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// One Newton step against the lower-tail cdf. Only called with p in (0, 0.5],
// where Phi(x) - p is cancellation free.
inline double std_normal_quantile_refined_lower(double p) {
  double x = std_normal_quantile_fast(p);
  const double f = 0.5 * std::erfc(-x * inv_sqrt2);
  const double dens = std_normal_pdf(x);
  if (dens > 0.0) x -= (f - p) / dens;
  return x;
}

}  // namespace detail

// Inverse of std_normal_cdf. Round trip |Phi(Phi^-1(u)) - u| stays below
// 1e-12 for u in [1e-300, 1 - 1e-16].
inline double std_normal_quantile(double u) {
  if (std::isnan(u) || u < 0.0 || u > 1.0)
    throw std::domain_error("std_normal_quantile: u outside [0,1]");
  if (u == 0.0) return -std::numeric_limits<double>::infinity();
  if (u == 1.0) return std::numeric_limits<double>::infinity();
  // 1-u is exact for u in [0.5, 1], so both halves refine in the lower tail.
  if (u > 0.5) return -detail::std_normal_quantile_refined_lower(1.0 - u);
  return detail::std_normal_quantile_refined_lower(u);
}

// Density of a standard bivariate normal with correlation rho at (z1, z2).
inline double bivariate_normal_pdf(double z1, double z2, double rho) {
  if (!(std::fabs(rho) < 1.0))
    throw std::domain_error("bivariate_normal_pdf: |rho| must be < 1");
  const double omr2 = 1.0 - rho * rho;
  const double quad = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / omr2;
  return std::exp(-0.5 * quad) / (2.0 * 3.14159265358979323846 * std::sqrt(omr2));
}

}  // namespace copred
