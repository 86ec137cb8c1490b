#include <benchmark/benchmark.h>

#include <vector>

#include "copred/copula.hpp"
#include "copred/estimator.hpp"
#include "copred/eval.hpp"
#include "copred/normal.hpp"
#include "copred/rng.hpp"

using namespace copred;

namespace {

EstimatorConfig std_config() {
  EstimatorConfig cfg;
  cfg.init = normal_init(0.0, 1.0);
  return cfg;
}

void bm_univariate_update(benchmark::State& bench) {
  const GridSpec grid{-8.0, 8.0, static_cast<int>(bench.range(0))};
  const auto cfg = std_config();
  auto st = init_state(grid, cfg);
  Rng rng(1);
  for (auto _ : bench) {
    absorb(st, rng.normal(), cfg);
    benchmark::DoNotOptimize(st.cdf.data());
  }
  bench.SetItemsProcessed(bench.iterations() * bench.range(0));
}

void bm_bivariate_update(benchmark::State& bench) {
  const int m = static_cast<int>(bench.range(0));
  const GridSpec grid{-6.0, 6.0, m};
  const auto cfg = std_config();
  auto st = bivariate_init_state(grid, grid, cfg);
  Rng rng(2);
  for (auto _ : bench) {
    bivariate_absorb(st, rng.normal(), rng.normal(), cfg);
    benchmark::DoNotOptimize(st.cdf.data());
  }
  bench.SetItemsProcessed(bench.iterations() * static_cast<long long>(m) * m);
}

void bm_quantile(benchmark::State& bench) {
  const GridSpec grid{-8.0, 8.0, 1024};
  const auto cfg = std_config();
  auto st = init_state(grid, cfg);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) absorb(st, rng.normal(), cfg);
  double q = 0.01;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(quantile(st, q));
    q += 0.009;
    if (q >= 0.99) q = 0.01;
  }
}

void bm_normal_quantile(benchmark::State& bench) {
  double u = 1e-9;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(std_normal_quantile(u));
    u *= 1.7;
    if (u >= 1.0) u = 1e-9;
  }
}

void bm_copula_density(benchmark::State& bench) {
  double u = 0.01;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(gaussian_copula_density(u, 0.37, 0.95));
    u += 0.013;
    if (u >= 0.99) u = 0.01;
  }
}

void bm_kde_fit(benchmark::State& bench) {
  const GridSpec grid{-8.0, 8.0, 1024};
  Rng rng(4);
  std::vector<double> ys(static_cast<std::size_t>(bench.range(0)));
  for (double& y : ys) y = rng.normal();
  for (auto _ : bench) {
    benchmark::DoNotOptimize(kde_baseline(ys, grid).cdf.data());
  }
}

BENCHMARK(bm_univariate_update)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_bivariate_update)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_quantile);
BENCHMARK(bm_normal_quantile);
BENCHMARK(bm_copula_density);
BENCHMARK(bm_kde_fit)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
