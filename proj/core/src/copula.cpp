#include "copred/copula.hpp"

#include <vector>

#include "copred/quadrature.hpp"

namespace copred {

double copula_mismatch_functional(std::span<const double> grid,
                                  std::span<const double> cdf_vals,
                                  std::span<const double> density_vals, double rho) {
  detail::require_corr(rho);
  const std::size_t m = grid.size();
  if (m < 2 || cdf_vals.size() != m || density_vals.size() != m)
    throw std::invalid_argument("copula_mismatch_functional: grid mismatch");

  // Trapezoid weight times p_star, and the z-scores of the clamped cdf,
  // hoisted out of the theta integrand.
  std::vector<double> wp(m), z(m);
  for (std::size_t j = 0; j < m; ++j) {
    double w;
    if (j == 0)
      w = 0.5 * (grid[1] - grid[0]);
    else if (j == m - 1)
      w = 0.5 * (grid[m - 1] - grid[m - 2]);
    else
      w = 0.5 * (grid[j + 1] - grid[j - 1]);
    wp[j] = w * density_vals[j];
    const double u = std::clamp(cdf_vals[j], 1e-10, 1.0 - 1e-10);
    z[j] = std_normal_quantile(u);
  }

  const double omr = 1.0 - rho;
  const double half_log_omr = 0.5 * std::log(omr);
  const double sd = std::sqrt(rho);
  auto integrand = [&](double theta) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = z[j] - theta;
      acc += wp[j] * std::exp(0.5 * z[j] * z[j] - d * d / (2.0 * omr) - half_log_omr);
    }
    const double weight = std_normal_pdf(theta / sd) / sd;
    return (acc * acc - 1.0) * weight;
  };
  return integrate(integrand, -8.0 * sd, 8.0 * sd, 1e-8, 0.0).value;
}

}  // namespace copred
