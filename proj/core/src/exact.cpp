#include "copred/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "copred/copula.hpp"
#include "copred/normal.hpp"

namespace copred {

namespace {
void require_exp_state(const ExponentialPredictive& s) {
  if (!(s.t >= 1.0) || s.n < 1) throw std::invalid_argument("exponential state invalid");
}
void require_nonneg(double y, const char* op) {
  if (!(y >= 0.0)) throw std::domain_error(std::string(op) + ": y must be >= 0");
}
}  // namespace

ExponentialPredictive exp_absorb(const ExponentialPredictive& s, double y) {
  require_exp_state(s);
  require_nonneg(y, "exp_absorb");
  return {s.t + y, s.n + 1};
}

double exp_predictive_pdf(const ExponentialPredictive& s, double y) {
  require_exp_state(s);
  require_nonneg(y, "exp_predictive_pdf");
  // n * t^n / (t+y)^(n+1), evaluated in log space for large n
  return std::exp(std::log(static_cast<double>(s.n)) + s.n * std::log(s.t) -
                  (s.n + 1.0) * std::log(s.t + y));
}

double exp_predictive_cdf(const ExponentialPredictive& s, double y) {
  require_exp_state(s);
  require_nonneg(y, "exp_predictive_cdf");
  return 1.0 - std::exp(s.n * (std::log(s.t) - std::log(s.t + y)));
}

std::pair<double, double> exp_copula_update_check(const ExponentialPredictive& s,
                                                  double y_obs, double y_eval) {
  require_exp_state(s);
  require_nonneg(y_obs, "exp_copula_update_check");
  require_nonneg(y_eval, "exp_copula_update_check");
  const double direct = exp_predictive_pdf(exp_absorb(s, y_obs), y_eval);
  const double u = std::clamp(exp_predictive_cdf(s, y_eval), 1e-15, 1.0 - 1e-15);
  const double v = std::clamp(exp_predictive_cdf(s, y_obs), 1e-15, 1.0 - 1e-15);
  const double via = exp_predictive_pdf(s, y_eval) * clayton_copula_density(u, v, s.n);
  return {direct, via};
}

namespace {
void require_normal_state(const NormalPredictive& s) {
  if (!(s.tau > 0.0) || s.n < 1) throw std::invalid_argument("normal state invalid");
}
}  // namespace

NormalPredictive normal_absorb(const NormalPredictive& s, double y) {
  require_normal_state(s);
  return {s.tau, s.t + y, s.n + 1};
}

double normal_predictive_pdf(const NormalPredictive& s, double y) {
  require_normal_state(s);
  const double mean = s.t / (s.n - 1.0 + s.tau);
  const double sd = std::sqrt((s.n + s.tau) / (s.n - 1.0 + s.tau));
  return std_normal_pdf((y - mean) / sd) / sd;
}

double normal_predictive_cdf(const NormalPredictive& s, double y) {
  require_normal_state(s);
  const double mean = s.t / (s.n - 1.0 + s.tau);
  const double sd = std::sqrt((s.n + s.tau) / (s.n - 1.0 + s.tau));
  return std_normal_cdf((y - mean) / sd);
}

std::pair<double, double> normal_copula_update_check(const NormalPredictive& s,
                                                     double y_obs, double y_eval) {
  require_normal_state(s);
  const double direct = normal_predictive_pdf(normal_absorb(s, y_obs), y_eval);
  const double rho = 1.0 / (s.n + s.tau);
  const double via =
      normal_predictive_pdf(s, y_eval) *
      gaussian_copula_density(normal_predictive_cdf(s, y_eval),
                              normal_predictive_cdf(s, y_obs), rho);
  return {direct, via};
}

namespace {
void require_multinomial_state(const MultinomialPredictive& s) {
  if (s.alphas.empty() || s.alphas.size() != s.counts.size())
    throw std::invalid_argument("multinomial state invalid: size mismatch");
  for (double a : s.alphas)
    if (!(a > 0.0)) throw std::invalid_argument("multinomial state invalid: alpha <= 0");
  long long total = 0;
  for (long long c : s.counts) {
    if (c < 0) throw std::invalid_argument("multinomial state invalid: negative count");
    total += c;
  }
  if (total != s.n) throw std::invalid_argument("multinomial state invalid: n != sum(counts)");
}
int checked_index(const MultinomialPredictive& s, int y, const char* op) {
  if (y < 1 || static_cast<std::size_t>(y) > s.alphas.size())
    throw std::out_of_range(std::string(op) + ": category out of range");
  return y - 1;
}
double beta_total(const MultinomialPredictive& s) {
  return std::accumulate(s.alphas.begin(), s.alphas.end(), 0.0);
}
}  // namespace

MultinomialPredictive multinomial_make(std::vector<double> alphas) {
  MultinomialPredictive s;
  s.alphas = std::move(alphas);
  s.counts.assign(s.alphas.size(), 0);
  s.n = 0;
  require_multinomial_state(s);
  return s;
}

MultinomialPredictive multinomial_absorb(const MultinomialPredictive& s, int y) {
  require_multinomial_state(s);
  const int i = checked_index(s, y, "multinomial_absorb");
  MultinomialPredictive out = s;
  out.counts[i] += 1;
  out.n += 1;
  return out;
}

double multinomial_predictive(const MultinomialPredictive& s, int y) {
  require_multinomial_state(s);
  const int i = checked_index(s, y, "multinomial_predictive");
  return (s.counts[i] + s.alphas[i]) / (s.n + beta_total(s));
}

double multinomial_predictive_cdf(const MultinomialPredictive& s, int y) {
  require_multinomial_state(s);
  checked_index(s, y, "multinomial_predictive_cdf");
  if (y == static_cast<int>(s.alphas.size())) return 1.0;  // exact, dodges fp dust
  const double denom = s.n + beta_total(s);
  double acc = 0.0;
  for (int z = 0; z < y; ++z) acc += (s.counts[z] + s.alphas[z]) / denom;
  return std::min(acc, 1.0);
}

double multinomial_update_ratio(const MultinomialPredictive& s, int y, int y_obs) {
  require_multinomial_state(s);
  const int i = checked_index(s, y, "multinomial_update_ratio");
  checked_index(s, y_obs, "multinomial_update_ratio");
  // the update being checked is absorption number s.n + 1
  const double beta = beta_total(s);
  const double m = static_cast<double>(s.n) + 1.0;
  const double bump = (y == y_obs) ? 1.0 / (s.counts[i] + s.alphas[i]) : 0.0;
  return (m - 1.0 + beta) / (m + beta) * (1.0 + bump);
}

std::pair<double, double> multinomial_copula_cdf_check(const MultinomialPredictive& s,
                                                       int y, int y_obs) {
  require_multinomial_state(s);
  checked_index(s, y, "multinomial_copula_cdf_check");
  checked_index(s, y_obs, "multinomial_copula_cdf_check");
  double direct = 0.0;
  for (int z = 1; z <= y; ++z)
    for (int zp = 1; zp <= y_obs; ++zp)
      direct += multinomial_update_ratio(s, z, zp) * multinomial_predictive(s, z) *
                multinomial_predictive(s, zp);
  const double w = 1.0 / (static_cast<double>(s.n) + 1.0 + beta_total(s));
  const double via = frechet_mixture_cdf(multinomial_predictive_cdf(s, y),
                                         multinomial_predictive_cdf(s, y_obs), w);
  return {direct, via};
}

}  // namespace copred
