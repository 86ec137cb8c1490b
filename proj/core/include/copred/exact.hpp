#pragma once

// Closed-form predictive distributions for three conjugate models, used as
// ground truth for the copula-factor form of the one-step predictive update:
// posterior predictive density = prior predictive density x copula density
// evaluated at the two cdf values.

#include <utility>
#include <vector>

namespace copred {

// Exponential likelihood with a unit-rate exponential prior on the rate.
// t = 1 + sum of absorbed observations; n = index of the next observation,
// so the fresh prior state is {t=1, n=1}.
struct ExponentialPredictive {
  double t = 1.0;
  int n = 1;
};

ExponentialPredictive exp_absorb(const ExponentialPredictive& s, double y);
double exp_predictive_pdf(const ExponentialPredictive& s, double y);
double exp_predictive_cdf(const ExponentialPredictive& s, double y);
// first = direct one-step posterior predictive pdf at y_eval;
// second = prior predictive pdf times the Clayton copula factor.
std::pair<double, double> exp_copula_update_check(const ExponentialPredictive& s,
                                                  double y_obs, double y_eval);

// N(theta, 1) likelihood, N(0, 1/tau) prior on the mean. t = sum of absorbed
// observations; n = index of the next observation. Predictive is
// N(t/(n-1+tau), (n+tau)/(n-1+tau)).
struct NormalPredictive {
  double tau = 1.0;
  double t = 0.0;
  int n = 1;
};

NormalPredictive normal_absorb(const NormalPredictive& s, double y);
double normal_predictive_pdf(const NormalPredictive& s, double y);
double normal_predictive_cdf(const NormalPredictive& s, double y);
// Copula factor is the Gaussian copula with correlation 1/(n+tau).
std::pair<double, double> normal_copula_update_check(const NormalPredictive& s,
                                                     double y_obs, double y_eval);

// Dirichlet(alphas) prior over M categories, labelled 1..M. counts holds the
// absorbed frequency table; n = sum(counts).
struct MultinomialPredictive {
  std::vector<double> alphas;
  std::vector<long long> counts;  // same length as alphas
  long long n = 0;
};

MultinomialPredictive multinomial_make(std::vector<double> alphas);
MultinomialPredictive multinomial_absorb(const MultinomialPredictive& s, int y);
double multinomial_predictive(const MultinomialPredictive& s, int y);
double multinomial_predictive_cdf(const MultinomialPredictive& s, int y);
// Ratio of post-update to pre-update predictive mass at category y when
// y_obs is absorbed next.
double multinomial_update_ratio(const MultinomialPredictive& s, int y, int y_obs);
// first = sum_{z<=y, z'<=y_obs} ratio(z,z') p(z) p(z');
// second = frechet_mixture_cdf of the two marginal cdf values.
std::pair<double, double> multinomial_copula_cdf_check(const MultinomialPredictive& s,
                                                       int y, int y_obs);

}  // namespace copred
