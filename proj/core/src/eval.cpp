#include "copred/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copred/normal.hpp"

namespace copred {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> default_check_quantiles() {
  return {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999};
}

double student_t5_pdf(double x) {
  static const double norm = 8.0 / (3.0 * kPi * std::sqrt(5.0));
  const double b = 1.0 + x * x / 5.0;
  return norm / (b * b * b);
}

double student_t5_cdf(double x) {
  // odd degrees of freedom integrate in closed form under x = sqrt(5) tan(theta)
  const double theta = std::atan(x / std::sqrt(5.0));
  return 0.5 + (theta + (2.0 / 3.0) * std::sin(2.0 * theta) +
                (1.0 / 12.0) * std::sin(4.0 * theta)) /
                   kPi;
}

namespace {
void require_mixture(const TMixtureSpec& spec) {
  if (!(spec.w >= 0.0 && spec.w <= 1.0))
    throw std::domain_error("t-mixture: w must be in [0,1]");
  if (!(spec.s >= 0.0)) throw std::domain_error("t-mixture: s must be >= 0");
  if (!std::isfinite(spec.mu)) throw std::domain_error("t-mixture: mu must be finite");
}
double fixed_weight(const TMixtureSpec& spec) {
  return spec.w_weights_fixed ? spec.w : 1.0 - spec.w;
}
}  // namespace

double t_mixture_pdf(const TMixtureSpec& spec, double y) {
  require_mixture(spec);
  const double wf = fixed_weight(spec);
  const double scale2 = spec.s + 1.0;
  return wf * student_t5_pdf(y - 1.0) +
         (1.0 - wf) * student_t5_pdf((y - spec.mu) / scale2) / scale2;
}

double t_mixture_cdf(const TMixtureSpec& spec, double y) {
  require_mixture(spec);
  const double wf = fixed_weight(spec);
  return wf * student_t5_cdf(y - 1.0) +
         (1.0 - wf) * student_t5_cdf((y - spec.mu) / (spec.s + 1.0));
}

double t_mixture_quantile(const TMixtureSpec& spec, double q) {
  require_mixture(spec);
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("t_mixture_quantile: q must be in (0,1)");
  double lo = -16.0, hi = 16.0;
  while (t_mixture_cdf(spec, lo) > q) lo *= 2.0;
  while (t_mixture_cdf(spec, hi) < q) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t_mixture_cdf(spec, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> t_mixture_sample(const TMixtureSpec& spec, std::size_t n, Rng& rng) {
  require_mixture(spec);
  const double wf = fixed_weight(spec);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fixed = rng.uniform() < wf;
    const double t = rng.student_t(5.0);
    out[i] = fixed ? 1.0 + t : spec.mu + (spec.s + 1.0) * t;
  }
  return out;
}

GridDistribution kde_baseline(std::span<const double> ys, const GridSpec& grid) {
  validate(grid);
  const std::size_t n = ys.size();
  if (n < 2) throw std::invalid_argument("kde_baseline: need at least 2 observations");
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
  if (!(sd > 0.0))
    throw std::invalid_argument("kde_baseline: zero-variance input, no bandwidth");
  const double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);

  GridDistribution state;
  state.grid = grid;
  state.count = static_cast<long long>(n);
  std::vector<double> dens(grid.m, 0.0);
  for (int j = 0; j < grid.m; ++j) {
    const double y = grid.point(j);
    double acc = 0.0;
    for (double yi : ys) acc += std_normal_pdf((y - yi) / h);
    dens[j] = acc / (static_cast<double>(n) * h);
  }
  state.cdf.assign(grid.m, 0.0);
  const double step = grid.step();
  for (int j = 1; j < grid.m; ++j)
    state.cdf[j] = state.cdf[j - 1] + 0.5 * (dens[j - 1] + dens[j]) * step;
  const double total = state.cdf.back();
  if (!(total > 0.0)) throw std::invalid_argument("kde_baseline: grid misses all the mass");
  for (double& c : state.cdf) c /= total;
  return state;
}

double kl_divergence(std::span<const double> p_true_density, const GridDistribution& state) {
  if (static_cast<int>(p_true_density.size()) != state.grid.m)
    throw std::invalid_argument("kl_divergence: grid mismatch");
  const std::vector<double> est = density(state);
  const double step = state.grid.step();
  double acc = 0.0;
  for (int j = 0; j < state.grid.m; ++j) {
    const double p = p_true_density[j];
    if (p < 0.0) throw std::invalid_argument("kl_divergence: negative reference density");
    if (p == 0.0) continue;
    const double term = p * std::log(p / std::max(est[j], 1e-12));
    acc += (j == 0 || j == state.grid.m - 1) ? 0.5 * term : term;
  }
  return acc * step;
}

std::vector<LossComparison> batch_loss_comparison(std::span<const double> qs,
                                                  std::span<const double> actions_a,
                                                  std::span<const double> actions_b,
                                                  std::span<const double> actions_truth,
                                                  const TMixtureSpec& spec, int oracle_mc,
                                                  std::uint64_t seed) {
  const std::size_t k = qs.size();
  if (actions_a.size() != k || actions_b.size() != k || actions_truth.size() != k)
    throw std::invalid_argument("batch_loss_comparison: action vectors must match qs");
  if (oracle_mc < 1) throw std::invalid_argument("batch_loss_comparison: oracle_mc must be >= 1");
  Rng rng(seed);
  const std::vector<double> draws =
      t_mixture_sample(spec, static_cast<std::size_t>(oracle_mc), rng);
  std::vector<LossComparison> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double q = qs[i];
    double la = 0.0, lb = 0.0, lt = 0.0;
    for (double y : draws) {
      la += check_loss(y, actions_a[i], q);
      lb += check_loss(y, actions_b[i], q);
      lt += check_loss(y, actions_truth[i], q);
    }
    const double inv = 1.0 / static_cast<double>(oracle_mc);
    out[i].loss_a = la * inv;
    out[i].loss_b = lb * inv;
    out[i].loss_truth = lt * inv;
    out[i].delta = out[i].loss_truth > 0.0
                       ? (out[i].loss_a - out[i].loss_b) / out[i].loss_truth
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<double> delta_q_batch(std::span<const double> qs, std::span<const double> actions_a,
                                  std::span<const double> actions_b,
                                  std::span<const double> actions_truth,
                                  const TMixtureSpec& spec, int oracle_mc, std::uint64_t seed) {
  const auto rows = batch_loss_comparison(qs, actions_a, actions_b, actions_truth, spec,
                                          oracle_mc, seed);
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].delta;
  return out;
}

double KdePredictor::action(double q) {
  if (fitted_count_ != ys_.size()) {
    fitted_ = kde_baseline(ys_, grid_);
    fitted_count_ = ys_.size();
  }
  return quantile(fitted_, q);
}

LossComparison sequential_loss_comparison(std::span<const double> ys, OnlinePredictor& method_a,
                                          OnlinePredictor& method_b, double q, int prime,
                                          double truth_action) {
  if (prime < 0) throw std::invalid_argument("sequential comparison: prime must be >= 0");
  if (ys.size() <= static_cast<std::size_t>(prime))
    throw std::invalid_argument("sequential comparison: need more observations than prime");
  std::size_t i = 0;
  for (; i < static_cast<std::size_t>(prime); ++i) {
    method_a.absorb(ys[i]);
    method_b.absorb(ys[i]);
  }
  LossComparison out;
  for (; i < ys.size(); ++i) {
    const double aa = method_a.action(q);
    const double ab = method_b.action(q);
    out.loss_a += check_loss(ys[i], aa, q);
    out.loss_b += check_loss(ys[i], ab, q);
    out.loss_truth += check_loss(ys[i], truth_action, q);
    method_a.absorb(ys[i]);
    method_b.absorb(ys[i]);
  }
  out.delta = out.loss_truth > 0.0 ? (out.loss_a - out.loss_b) / out.loss_truth
                                   : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double delta_q_sequential(std::span<const double> ys, OnlinePredictor& method_a,
                          OnlinePredictor& method_b, double q, int prime,
                          double truth_action) {
  return sequential_loss_comparison(ys, method_a, method_b, q, prime, truth_action).delta;
}

namespace {

struct TrialDraw {
  TMixtureSpec spec;
  std::vector<double> ys;
};

TrialDraw draw_trial(const SimulationDesign& design, int trial) {
  Rng rng = Rng::for_stream(design.seed, 2ULL * static_cast<std::uint64_t>(trial));
  TrialDraw out;
  out.spec.w = rng.beta(2.0, 2.0);
  out.spec.s = rng.gamma(1.0);
  out.spec.mu = 2.0 * rng.normal();  // N(0, 4)
  out.ys = t_mixture_sample(out.spec, static_cast<std::size_t>(design.n_obs), rng);
  return out;
}

std::uint64_t oracle_seed(const SimulationDesign& design, int trial) {
  return detail::splitmix64(design.seed +
                            0x9E3779B97F4A7C15ULL * (2ULL * static_cast<std::uint64_t>(trial) + 2));
}

void require_design(const SimulationDesign& design) {
  if (design.n_obs < 1 || design.n_trials < 1 || design.oracle_mc < 1 || design.prime < 0)
    throw std::invalid_argument("simulation design: counts must be positive");
}

}  // namespace

std::vector<TrialRow> run_batch_study(const SimulationDesign& design,
                                      std::span<const double> qs,
                                      const EstimatorConfig& estimator_cfg,
                                      const GridSpec& grid) {
  require_design(design);
  std::vector<TrialRow> rows;
  rows.reserve(static_cast<std::size_t>(design.n_trials) * qs.size());
  for (int trial = 0; trial < design.n_trials; ++trial) {
    const TrialDraw draw = draw_trial(design, trial);
    const GridDistribution fit = fit_sequence(draw.ys, grid, estimator_cfg);
    const GridDistribution kde = kde_baseline(draw.ys, grid);
    std::vector<double> a_rec(qs.size()), a_base(qs.size()), a_truth(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
      a_rec[i] = quantile(fit, qs[i]);
      a_base[i] = quantile(kde, qs[i]);
      a_truth[i] = t_mixture_quantile(draw.spec, qs[i]);
    }
    const auto comps = batch_loss_comparison(qs, a_rec, a_base, a_truth, draw.spec,
                                             design.oracle_mc, oracle_seed(design, trial));
    for (std::size_t i = 0; i < qs.size(); ++i)
      rows.push_back({trial, qs[i], comps[i].delta, comps[i].loss_a, comps[i].loss_b,
                      comps[i].loss_truth});
  }
  return rows;
}

std::vector<TrialRow> run_sequential_study(const SimulationDesign& design,
                                           std::span<const double> qs,
                                           const EstimatorConfig& estimator_cfg,
                                           const GridSpec& grid) {
  require_design(design);
  std::vector<TrialRow> rows;
  rows.reserve(static_cast<std::size_t>(design.n_trials) * qs.size());
  for (int trial = 0; trial < design.n_trials; ++trial) {
    const TrialDraw draw = draw_trial(design, trial);
    for (double q : qs) {
      RecursivePredictor rec(grid, estimator_cfg);
      KdePredictor kde(grid);
      const double truth_action = t_mixture_quantile(draw.spec, q);
      const LossComparison comp =
          sequential_loss_comparison(draw.ys, rec, kde, q, design.prime, truth_action);
      rows.push_back({trial, q, comp.delta, comp.loss_a, comp.loss_b, comp.loss_truth});
    }
  }
  return rows;
}

DeltaAggregate aggregate_deltas(std::span<const double> deltas) {
  std::vector<double> xs;
  xs.reserve(deltas.size());
  for (double d : deltas)
    if (std::isfinite(d)) xs.push_back(d);
  DeltaAggregate out;
  out.n = static_cast<int>(xs.size());
  if (xs.empty()) {
    out.mean = out.median = out.sd = out.pr_negative =
        std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  int neg = 0;
  for (double x : xs) {
    sum += x;
    if (x < 0.0) ++neg;
  }
  out.mean = sum / static_cast<double>(xs.size());
  out.pr_negative = static_cast<double>(neg) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.sd = xs.size() > 1 ? std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0)) : 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  out.median = xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
  return out;
}

}  // namespace copred
