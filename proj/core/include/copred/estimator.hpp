#pragma once

// Streaming predictive-distribution estimator. State is the predictive cdf
// tabulated on a fixed grid; each observation blends the current cdf with a
// Gaussian-copula conditional cdf evaluated at the observation's rank:
//
//   P_new(y) = (1-alpha) P(y) + alpha * H(P(y), P(y_obs)),  alpha = a/(n+1),
//
// which keeps the table monotone and costs O(grid) per observation.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace copred {

struct GridSpec {
  double lo = -8.0;
  double hi = 8.0;
  int m = 1024;

  double step() const { return (hi - lo) / (m - 1); }
  double point(int j) const { return lo + j * step(); }
  std::vector<double> points() const {
    std::vector<double> p(m);
    for (int j = 0; j < m; ++j) p[j] = point(j);
    return p;
  }
};

void validate(const GridSpec& g);

enum class InitFamily { Normal, Cauchy, EmpiricalBayesNormal };

// First guess P0. center/spread mean: Normal = (mean, variance),
// Cauchy = (location, scale), EmpiricalBayesNormal = (ignored, variance)
// with the mean taken from the data preview at init time.
struct InitSpec {
  InitFamily family = InitFamily::Normal;
  double center = 0.0;
  double spread = 1.0;
};

InitSpec normal_init(double mean, double variance);
InitSpec cauchy_init(double location, double scale);
InitSpec eb_normal_init(double variance);

double init_cdf(const InitSpec& spec, double y);
double init_pdf(const InitSpec& spec, double y);
double init_quantile(const InitSpec& spec, double q);
std::string init_to_string(const InitSpec& spec);
InitSpec init_from_string(const std::string& text);

// Materializes data-dependent inits: empirical-Bayes becomes a plain normal
// centered at the preview mean. Throws if that requires an empty preview.
InitSpec resolved_init(const InitSpec& spec, std::span<const double> preview);

struct EstimatorConfig {
  double rho = 0.95;        // copula correlation, in (0,1)
  double weight_a = 1.0;    // step sizes alpha_n = weight_a/(n+1); in (0,2],
                            // weight_a = 2 makes the first step a full replacement
  double clamp_eps = 1e-10; // cdf values are clamped to [eps, 1-eps] before
                            // the normal quantile; in (0, 0.01]
  InitSpec init;
  double coverage_eps = 0.0;  // max initial cdf mass allowed outside the grid;
                              // 0 = auto (1e-6, or 1e-3 for the Cauchy init)
};

void validate(const EstimatorConfig& cfg);
double effective_coverage_eps(const EstimatorConfig& cfg);

struct GridDistribution {
  GridSpec grid;
  std::vector<double> cdf;
  long long count = 0;
  long long tail_hits = 0;  // observations that fell outside [grid.lo, grid.hi]
};

// Tabulates P0 on the grid. preview is consulted only by the
// empirical-Bayes init (its mean becomes the center). Fails if the grid
// leaves more than the coverage bound of P0 mass outside either end.
GridDistribution init_state(const GridSpec& grid, const EstimatorConfig& cfg,
                            std::span<const double> preview = {});

// One observation, in place. Throws on non-finite y_obs.
void absorb(GridDistribution& state, double y_obs, const EstimatorConfig& cfg);

inline GridDistribution update(GridDistribution state, double y_obs,
                               const EstimatorConfig& cfg) {
  absorb(state, y_obs, cfg);
  return state;
}

// Piecewise-linear cdf with constant extrapolation beyond the grid.
double interp_cdf(const GridDistribution& state, double y);

// Difference-ratio density: central differences inside, one-sided at the
// ends. Nonnegative whenever the cdf is monotone, and its trapezoid integral
// telescopes to cdf.back() - cdf.front().
std::vector<double> density(const GridDistribution& state);

// Leftmost y with interp_cdf(y) = q. Throws std::out_of_range (naming the
// achievable range) when q is outside (cdf.front(), cdf.back()).
double quantile(const GridDistribution& state, double q);

double mean(const GridDistribution& state);

// Folds ys through absorb. With permutations = k > 0, fits k seeded random
// orderings of ys from the same init and averages the final cdfs pointwise
// (an average of monotone tables is monotone).
GridDistribution fit_sequence(std::span<const double> ys, const GridSpec& grid,
                              const EstimatorConfig& cfg, int permutations = 0,
                              std::uint64_t seed = 0);

// Grid for data whose scale is known only from a preview: mean +- 10 sd.
// Without a preview, the init's [1e-6, 1-1e-6] quantile range, clipped to
// +-500 scale units for the Cauchy init.
GridSpec default_grid(const EstimatorConfig& cfg, std::span<const double> preview,
                      int m = 1024);

// Joint-cdf analogue on a product grid (row j = y axis, column k = x axis).
// Updates multiply two conditional-cdf factors, one per coordinate, each
// conditioning on the joint cdf with the observed value spliced into that
// coordinate. Row/column monotonicity is not guaranteed by the recursion;
// decreases are counted in mono_violations instead of being repaired.
struct BivariateGridDistribution {
  GridSpec grid_y, grid_x;
  std::vector<double> cdf;  // row-major, grid_y.m x grid_x.m
  long long count = 0;
  long long tail_hits = 0;
  long long mono_violations = 0;

  double& at(int j, int k) { return cdf[static_cast<std::size_t>(j) * grid_x.m + k]; }
  double at(int j, int k) const { return cdf[static_cast<std::size_t>(j) * grid_x.m + k]; }
};

// Product init: cdf[j,k] = P0(y_j) P0(x_k), same P0 family on both axes.
// The previews feed the empirical-Bayes init one axis at a time.
BivariateGridDistribution bivariate_init_state(const GridSpec& grid_y,
                                               const GridSpec& grid_x,
                                               const EstimatorConfig& cfg,
                                               std::span<const double> preview_y = {},
                                               std::span<const double> preview_x = {});

void bivariate_absorb(BivariateGridDistribution& state, double y_obs, double x_obs,
                      const EstimatorConfig& cfg);

inline BivariateGridDistribution bivariate_update(BivariateGridDistribution state,
                                                  double y_obs, double x_obs,
                                                  const EstimatorConfig& cfg) {
  bivariate_absorb(state, y_obs, x_obs, cfg);
  return state;
}

}  // namespace copred
