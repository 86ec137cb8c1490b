#pragma once

// Bivariate copula densities and transforms. The Gaussian-copula conditional
// cdf is the workhorse of the grid update; the Clayton and Frechet-Hoeffding
// forms are the closed-form counterparts used by the parametric oracles.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "copred/normal.hpp"

namespace copred {

namespace detail {
inline void require_corr(double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("copula correlation must be in (0,1)");
}
inline void require_interior(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error(std::string(what) + " must be in (0,1)");
}
}  // namespace detail

// log c_rho(u,v); the 2*pi normalizers of the three normal densities cancel.
inline double gaussian_copula_log_density(double u, double v, double rho) {
  detail::require_corr(rho);
  detail::require_interior(u, "gaussian_copula_log_density: u");
  detail::require_interior(v, "gaussian_copula_log_density: v");
  const double z1 = std_normal_quantile(u);
  const double z2 = std_normal_quantile(v);
  const double omr2 = 1.0 - rho * rho;
  return -0.5 * std::log(omr2) -
         (rho * rho * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2) / (2.0 * omr2);
}

inline double gaussian_copula_density(double u, double v, double rho) {
  return std::exp(gaussian_copula_log_density(u, v, rho));
}

// Conditional cdf of the Gaussian copula given its second coordinate:
// Phi((Phi^-1(u) - rho Phi^-1(v)) / sqrt(1-rho^2)). Total in u on [0,1].
inline double gaussian_copula_conditional_cdf(double u, double v, double rho) {
  detail::require_corr(rho);
  detail::require_interior(v, "gaussian_copula_conditional_cdf: v");
  if (std::isnan(u) || u < 0.0 || u > 1.0)
    throw std::domain_error("gaussian_copula_conditional_cdf: u must be in [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double z = std_normal_quantile(u) - rho * std_normal_quantile(v);
  return std_normal_cdf(z / std::sqrt(1.0 - rho * rho));
}

// Ratio N(Phi^-1(u) | theta, 1-rho) / N(Phi^-1(u) | 0, 1). Mixing it over
// theta ~ N(0, rho) reproduces the copula density, which is the identity the
// mismatch functional below is built on.
inline double copula_mixture_kernel(double u, double theta, double rho) {
  detail::require_corr(rho);
  detail::require_interior(u, "copula_mixture_kernel: u");
  const double z = std_normal_quantile(u);
  const double d = z - theta;
  return std::exp(0.5 * z * z - d * d / (2.0 * (1.0 - rho)) - 0.5 * std::log(1.0 - rho));
}

// Copula density of the unit-exponential-prior predictive family after n-1
// observations; the parameter is 1/n.
inline double clayton_copula_density(double u, double v, int n) {
  if (n < 1) throw std::domain_error("clayton_copula_density: n must be >= 1");
  detail::require_interior(u, "clayton_copula_density: u");
  detail::require_interior(v, "clayton_copula_density: v");
  const double inv_n = 1.0 / n;
  const double su = 1.0 - u, sv = 1.0 - v;
  // log-space keeps the corners (u or v near 1) finite as long as possible
  const double lsu = std::log(su), lsv = std::log(sv);
  const double base = std::exp(-inv_n * lsu) + std::exp(-inv_n * lsv) - 1.0;
  return std::exp(std::log((n + 1.0) * inv_n) - (1.0 + inv_n) * (lsu + lsv) -
                  (n + 2.0) * std::log(base));
}

// (1-w) u v + w min(u,v): the cdf-scale update of a Dirichlet-multinomial
// predictive, blending independence with perfect positive dependence.
inline double frechet_mixture_cdf(double u, double v, double w) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw std::domain_error("frechet_mixture_cdf: u, v must be in [0,1]");
  if (!(w >= 0.0 && w <= 1.0))
    throw std::domain_error("frechet_mixture_cdf: w must be in [0,1]");
  return (1.0 - w) * u * v + w * std::min(u, v);
}

// Discrepancy functional between a cdf P tabulated on a grid and a reference
// density p_star on the same grid:
//
//   T = int [ m(theta)^2 - 1 ] N(theta | 0, rho) dtheta,
//   m(theta) = int kernel(P(y), theta) p_star(y) dy,
//
// zero when P is the cdf of p_star, strictly positive otherwise (up to grid
// and quadrature error). Inner integral by trapezoid on the grid, outer by
// adaptive quadrature over theta in [-8 sqrt(rho), 8 sqrt(rho)].
double copula_mismatch_functional(std::span<const double> grid,
                                  std::span<const double> cdf_vals,
                                  std::span<const double> density_vals, double rho);

}  // namespace copred
