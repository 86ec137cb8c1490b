#pragma once

// Check-loss scoring, the t-mixture data generator, a kernel-density
// baseline, and the batch/sequential comparison harnesses built on them.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "copred/estimator.hpp"
#include "copred/rng.hpp"

namespace copred {

// (1-q)(a-y) when the outcome undershoots the action, q(y-a) when it
// overshoots; its expectation is minimized at the q-quantile.
inline double check_loss(double y, double a, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("check_loss: q must be in (0,1)");
  if (y < a) return (1.0 - q) * (a - y);
  if (y > a) return q * (y - a);
  return 0.0;
}

inline double optimal_action(const GridDistribution& state, double q) {
  return quantile(state, q);
}

// the default scoring quantiles, extreme tails included
std::vector<double> default_check_quantiles();

// Student t with 5 degrees of freedom (closed forms; no general-df machinery)
double student_t5_pdf(double x);
double student_t5_cdf(double x);

// Two-component t5 location-scale mixture. One component is pinned at
// location 1, scale 1; the other sits at mu with scale s+1. By default w
// weighs the pinned component; w_weights_fixed = false flips that reading.
struct TMixtureSpec {
  double w = 0.5;
  double mu = 0.0;
  double s = 0.0;
  bool w_weights_fixed = true;
};

double t_mixture_pdf(const TMixtureSpec& spec, double y);
double t_mixture_cdf(const TMixtureSpec& spec, double y);
double t_mixture_quantile(const TMixtureSpec& spec, double q);  // bisection to 1e-10
std::vector<double> t_mixture_sample(const TMixtureSpec& spec, std::size_t n, Rng& rng);

// Gaussian-kernel density on the grid with the normal-reference bandwidth
// 1.06 sd n^(-1/5); cdf by cumulative trapezoid, renormalized to end at 1.
GridDistribution kde_baseline(std::span<const double> ys, const GridSpec& grid);

// Trapezoid integral of p_true log(p_true / p_hat) over the state's grid,
// with the estimated density floored at 1e-12 inside the log.
double kl_divergence(std::span<const double> p_true_density, const GridDistribution& state);

struct LossComparison {
  double loss_a = 0.0;
  double loss_b = 0.0;
  double loss_truth = 0.0;
  double delta = 0.0;  // (loss_a - loss_b) / loss_truth; NaN if loss_truth = 0
};

// Monte Carlo expected-loss comparison with common draws across actions and
// quantiles. One entry per q.
std::vector<LossComparison> batch_loss_comparison(std::span<const double> qs,
                                                  std::span<const double> actions_a,
                                                  std::span<const double> actions_b,
                                                  std::span<const double> actions_truth,
                                                  const TMixtureSpec& spec, int oracle_mc,
                                                  std::uint64_t seed);

std::vector<double> delta_q_batch(std::span<const double> qs,
                                  std::span<const double> actions_a,
                                  std::span<const double> actions_b,
                                  std::span<const double> actions_truth,
                                  const TMixtureSpec& spec, int oracle_mc,
                                  std::uint64_t seed);

// Anything that can absorb a stream and name a check-loss-optimal action.
class OnlinePredictor {
 public:
  virtual ~OnlinePredictor() = default;
  virtual void absorb(double y) = 0;
  virtual double action(double q) = 0;
};

class RecursivePredictor final : public OnlinePredictor {
 public:
  RecursivePredictor(const GridSpec& grid, const EstimatorConfig& cfg)
      : cfg_(cfg), state_(init_state(grid, cfg)) {}
  void absorb(double y) override { copred::absorb(state_, y, cfg_); }
  double action(double q) override { return quantile(state_, q); }
  const GridDistribution& state() const { return state_; }

 private:
  EstimatorConfig cfg_;
  GridDistribution state_;
};

// Stores the stream and refits (bandwidth included) whenever asked for an
// action after new data, mirroring an adaptive-bandwidth online use.
class KdePredictor final : public OnlinePredictor {
 public:
  explicit KdePredictor(const GridSpec& grid) : grid_(grid) {}
  void absorb(double y) override { ys_.push_back(y); }
  double action(double q) override;

 private:
  GridSpec grid_;
  std::vector<double> ys_;
  GridDistribution fitted_;
  std::size_t fitted_count_ = 0;
};

// Feeds the first `prime` observations to both methods unscored, then
// alternates predict-then-score through the rest. The truth action is held
// fixed (the true distribution does not change). delta = (sum of a's losses
// - sum of b's) / sum of the truth action's losses.
LossComparison sequential_loss_comparison(std::span<const double> ys, OnlinePredictor& method_a,
                                          OnlinePredictor& method_b, double q, int prime,
                                          double truth_action);

double delta_q_sequential(std::span<const double> ys, OnlinePredictor& method_a,
                          OnlinePredictor& method_b, double q, int prime,
                          double truth_action);

struct SimulationDesign {
  int n_obs = 50;
  int n_trials = 500;
  int oracle_mc = 100000;
  std::uint64_t seed = 1;
  int prime = 4;  // sequential mode only
};

struct TrialRow {
  int trial = 0;
  double q = 0.0;
  double delta = 0.0;
  double loss_rec = 0.0;
  double loss_base = 0.0;
  double loss_truth = 0.0;
};

// Per trial: hyperdraws w ~ Beta(2,2), s ~ Gamma(1,1), mu ~ N(0,4), a fresh
// sample of n_obs, a recursive fit and a kernel fit on the given grid, and a
// loss comparison per q. Batch scores by Monte Carlo on fresh draws;
// sequential scores the prime-then-predict loop on the sample itself.
std::vector<TrialRow> run_batch_study(const SimulationDesign& design,
                                      std::span<const double> qs,
                                      const EstimatorConfig& estimator_cfg,
                                      const GridSpec& grid);
std::vector<TrialRow> run_sequential_study(const SimulationDesign& design,
                                           std::span<const double> qs,
                                           const EstimatorConfig& estimator_cfg,
                                           const GridSpec& grid);

struct DeltaAggregate {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double pr_negative = 0.0;
  int n = 0;  // finite deltas included
};

// NaN deltas (degenerate truth loss) are dropped; n reports what remained.
DeltaAggregate aggregate_deltas(std::span<const double> deltas);

}  // namespace copred
