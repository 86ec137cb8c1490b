#include "copred/verify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "copred/copula.hpp"
#include "copred/estimator.hpp"
#include "copred/eval.hpp"
#include "copred/exact.hpp"
#include "copred/normal.hpp"
#include "copred/quadrature.hpp"
#include "copred/rng.hpp"

namespace copred {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.pass; });
}

namespace {

VerifyCheck bounded_check(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, std::abs(measured) <= tolerance};
}

double mixture_density_by_quadrature(double u, double v, double rho) {
  const double half_width = 8.0 * std::sqrt(rho);
  const double inv_sr = 1.0 / std::sqrt(rho);
  const auto integrand = [&](double theta) {
    return copula_mixture_kernel(u, theta, rho) * copula_mixture_kernel(v, theta, rho) *
           std_normal_pdf(theta * inv_sr) * inv_sr;
  };
  // The integrand is a narrow off-center spike when rho is close to 1; sum
  // fixed panels so the adaptive rule cannot step over it unawares.
  constexpr int panels = 16;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -half_width + 2.0 * half_width * p / panels;
    const double b = -half_width + 2.0 * half_width * (p + 1) / panels;
    total += integrate(integrand, a, b, 1e-10 / panels, 0.0).value;
  }
  return total;
}

}  // namespace

VerifyReport verify_copulas() {
  VerifyReport report;
  report.suite = "copulas";

  double worst_mix = 0.0;
  for (double rho : {0.5, 0.95})
    for (double u : {0.25, 0.5, 0.75})
      for (double v : {0.25, 0.5, 0.75}) {
        const double closed = gaussian_copula_density(u, v, rho);
        const double quad = mixture_density_by_quadrature(u, v, rho);
        worst_mix = std::max(worst_mix, std::abs(closed - quad));
      }
  report.checks.push_back(bounded_check("mixture_representation_max_abs_err", worst_mix, 1e-6));

  double worst_marginal = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double u = 0.1 * i;
    const double integral =
        integrate([&](double v) { return gaussian_copula_conditional_cdf(u, v, 0.95); }, 0.0,
                  1.0, 1e-9, 0.0)
            .value;
    worst_marginal = std::max(worst_marginal, std::abs(integral - u));
  }
  report.checks.push_back(bounded_check("conditional_marginal_max_abs_err", worst_marginal, 1e-6));

  const GridSpec grid{-8.0, 8.0, 1024};
  std::vector<double> pts(grid.m), cdf(grid.m), pdf(grid.m), pdf_shift(grid.m);
  for (int j = 0; j < grid.m; ++j) {
    pts[j] = grid.point(j);
    cdf[j] = std_normal_cdf(pts[j]);
    pdf[j] = std_normal_pdf(pts[j]);
    pdf_shift[j] = std_normal_pdf(pts[j] - 0.5);
  }
  const double t_match = copula_mismatch_functional(pts, cdf, pdf, 0.95);
  report.checks.push_back(bounded_check("mismatch_functional_at_truth", t_match, 1e-4));

  const double t_off = copula_mismatch_functional(pts, cdf, pdf_shift, 0.95);
  report.checks.push_back({"mismatch_functional_positivity_off_truth", t_off, 0.0, t_off > 0.0});

  return report;
}

VerifyReport verify_exact(std::uint64_t seed) {
  VerifyReport report;
  report.suite = "exact";
  Rng rng(seed);

  double worst_exp = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    ExponentialPredictive s;
    for (int n = 1; n <= 20; ++n) {
      const double y_obs = -std::log(rng.uniform());
      const double y_eval = -std::log(rng.uniform());
      const auto [direct, via] = exp_copula_update_check(s, y_obs, y_eval);
      worst_exp = std::max(worst_exp, std::abs(direct - via) / direct);
      s = exp_absorb(s, y_obs);
    }
  }
  report.checks.push_back(bounded_check("exponential_copula_update_max_rel_err", worst_exp, 1e-10));

  double worst_norm = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    NormalPredictive s;
    for (int n = 1; n <= 20; ++n) {
      const double y_obs = rng.normal();
      const double y_eval = rng.normal();
      const auto [direct, via] = normal_copula_update_check(s, y_obs, y_eval);
      worst_norm = std::max(worst_norm, std::abs(direct - via) / direct);
      s = normal_absorb(s, y_obs);
    }
  }
  report.checks.push_back(bounded_check("normal_copula_update_max_rel_err", worst_norm, 1e-8));

  double worst_mult = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const int categories = 3 + static_cast<int>(rng.bounded(3));
    std::vector<double> alphas(categories);
    for (double& a : alphas) a = 0.5 + 2.0 * rng.uniform();
    MultinomialPredictive s = multinomial_make(alphas);
    for (int step = 0; step < 20; ++step) {
      const int y_obs = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(categories)));
      for (int y = 1; y <= categories; ++y) {
        const auto [direct, via] = multinomial_copula_cdf_check(s, y, y_obs);
        worst_mult = std::max(worst_mult, std::abs(direct - via));
      }
      s = multinomial_absorb(s, y_obs);
    }
  }
  report.checks.push_back(bounded_check("multinomial_cdf_mixture_max_abs_err", worst_mult, 1e-12));

  return report;
}

VerifyReport verify_consistency(std::uint64_t seed) {
  VerifyReport report;
  report.suite = "consistency";

  const GridSpec grid{-8.0, 8.0, 2048};
  EstimatorConfig cfg;
  cfg.rho = 0.95;
  cfg.weight_a = 1.0;
  cfg.init = normal_init(0.0, 9.0);
  cfg.coverage_eps = 0.01;  // the deliberately wide init leaves ~0.4% mass off-grid

  std::vector<double> truth(grid.m);
  for (int j = 0; j < grid.m; ++j) truth[j] = std_normal_pdf(grid.point(j));

  std::vector<double> kl_small, kl_large;
  for (int stream = 0; stream < 10; ++stream) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(stream));
    GridDistribution state = init_state(grid, cfg);
    int n = 0;
    for (; n < 50; ++n) absorb(state, rng.normal(), cfg);
    kl_small.push_back(kl_divergence(truth, state));
    for (; n < 5000; ++n) absorb(state, rng.normal(), cfg);
    kl_large.push_back(kl_divergence(truth, state));
  }
  const auto median = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
  };
  const double m_small = median(kl_small);
  const double m_large = median(kl_large);

  report.checks.push_back({"kl_median_n5000", m_large, 0.01, m_large < 0.01});
  report.checks.push_back({"kl_median_n5000_minus_n50", m_large - m_small, 0.0,
                           m_large < m_small});
  return report;
}

}  // namespace copred
