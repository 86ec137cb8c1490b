#include "copred/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "copred/normal.hpp"
#include "copred/rng.hpp"

namespace copred {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string num_to_string(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void validate(const GridSpec& g) {
  if (!(g.lo < g.hi) || !std::isfinite(g.lo) || !std::isfinite(g.hi))
    throw std::invalid_argument("grid: lo must be finite and < hi");
  if (g.m < 16) throw std::invalid_argument("grid: need at least 16 points");
}

InitSpec normal_init(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal init: variance must be > 0");
  return {InitFamily::Normal, mean, variance};
}

InitSpec cauchy_init(double location, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("cauchy init: scale must be > 0");
  return {InitFamily::Cauchy, location, scale};
}

InitSpec eb_normal_init(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("eb-normal init: variance must be > 0");
  return {InitFamily::EmpiricalBayesNormal, 0.0, variance};
}

double init_cdf(const InitSpec& spec, double y) {
  switch (spec.family) {
    case InitFamily::Cauchy:
      return 0.5 + std::atan((y - spec.center) / spec.spread) / kPi;
    case InitFamily::Normal:
    case InitFamily::EmpiricalBayesNormal:
      return std_normal_cdf((y - spec.center) / std::sqrt(spec.spread));
  }
  throw std::logic_error("init_cdf: unknown family");
}

double init_pdf(const InitSpec& spec, double y) {
  switch (spec.family) {
    case InitFamily::Cauchy: {
      const double z = (y - spec.center) / spec.spread;
      return 1.0 / (kPi * spec.spread * (1.0 + z * z));
    }
    case InitFamily::Normal:
    case InitFamily::EmpiricalBayesNormal: {
      const double sd = std::sqrt(spec.spread);
      return std_normal_pdf((y - spec.center) / sd) / sd;
    }
  }
  throw std::logic_error("init_pdf: unknown family");
}

double init_quantile(const InitSpec& spec, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("init_quantile: q must be in (0,1)");
  switch (spec.family) {
    case InitFamily::Cauchy:
      return spec.center + spec.spread * std::tan(kPi * (q - 0.5));
    case InitFamily::Normal:
    case InitFamily::EmpiricalBayesNormal:
      return spec.center + std::sqrt(spec.spread) * std_normal_quantile(q);
  }
  throw std::logic_error("init_quantile: unknown family");
}

std::string init_to_string(const InitSpec& spec) {
  switch (spec.family) {
    case InitFamily::Normal:
      return "normal:" + num_to_string(spec.center) + "," + num_to_string(spec.spread);
    case InitFamily::Cauchy:
      return "cauchy:" + num_to_string(spec.center) + "," + num_to_string(spec.spread);
    case InitFamily::EmpiricalBayesNormal:
      return "eb-normal:" + num_to_string(spec.spread);
  }
  throw std::logic_error("init_to_string: unknown family");
}

InitSpec init_from_string(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("init spec '" + text +
                                "': expected family:params, e.g. normal:0,1 or eb-normal:9");
  const std::string family = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  auto parse_num = [&](const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("init spec '" + text + "': bad number '" + s + "'");
    }
    if (pos != s.size())
      throw std::invalid_argument("init spec '" + text + "': bad number '" + s + "'");
    return v;
  };
  const auto comma = params.find(',');
  if (family == "eb-normal") {
    if (comma != std::string::npos)
      throw std::invalid_argument("init spec '" + text + "': eb-normal takes one parameter");
    return eb_normal_init(parse_num(params));
  }
  if (comma == std::string::npos)
    throw std::invalid_argument("init spec '" + text + "': expected two parameters");
  const double p1 = parse_num(params.substr(0, comma));
  const double p2 = parse_num(params.substr(comma + 1));
  if (family == "normal") return normal_init(p1, p2);
  if (family == "cauchy") return cauchy_init(p1, p2);
  throw std::invalid_argument("init spec '" + text +
                              "': family must be normal, cauchy or eb-normal");
}

void validate(const EstimatorConfig& cfg) {
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0))
    throw std::invalid_argument("config: rho must be in (0,1)");
  if (!(cfg.weight_a > 0.0 && cfg.weight_a <= 2.0))
    throw std::invalid_argument(
        "config: weight_a must be in (0,2] (2 makes the first step a full replacement)");
  if (!(cfg.clamp_eps > 0.0 && cfg.clamp_eps <= 0.01))
    throw std::invalid_argument("config: clamp_eps must be in (0, 0.01]");
  if (!(cfg.init.spread > 0.0))
    throw std::invalid_argument("config: init spread must be > 0");
  if (cfg.coverage_eps < 0.0 || cfg.coverage_eps >= 0.5)
    throw std::invalid_argument("config: coverage_eps must be in [0, 0.5)");
}

double effective_coverage_eps(const EstimatorConfig& cfg) {
  if (cfg.coverage_eps > 0.0) return cfg.coverage_eps;
  return cfg.init.family == InitFamily::Cauchy ? 1e-3 : 1e-6;
}

InitSpec resolved_init(const InitSpec& init, std::span<const double> preview) {
  if (init.family != InitFamily::EmpiricalBayesNormal) return init;
  if (preview.empty())
    throw std::invalid_argument("eb-normal init needs a data preview for its mean");
  double mean = 0.0;
  for (double y : preview) mean += y;
  mean /= static_cast<double>(preview.size());
  InitSpec r = init;
  r.family = InitFamily::Normal;
  r.center = mean;
  return r;
}

namespace {

void check_coverage(double lo_mass, double hi_tail, double bound) {
  if (lo_mass > bound)
    throw std::invalid_argument("grid does not cover the initial distribution: cdf at lo = " +
                                num_to_string(lo_mass) + " exceeds the coverage bound " +
                                num_to_string(bound));
  if (hi_tail > bound)
    throw std::invalid_argument(
        "grid does not cover the initial distribution: 1 - cdf at hi = " +
        num_to_string(hi_tail) + " exceeds the coverage bound " + num_to_string(bound));
}

}  // namespace

GridDistribution init_state(const GridSpec& grid, const EstimatorConfig& cfg,
                            std::span<const double> preview) {
  validate(grid);
  validate(cfg);
  const InitSpec init = resolved_init(cfg.init, preview);
  GridDistribution state;
  state.grid = grid;
  state.cdf.resize(grid.m);
  double prev = 0.0;
  for (int j = 0; j < grid.m; ++j) {
    double c = init_cdf(init, grid.point(j));
    if (c < prev) c = prev;  // analytic cdfs are monotone; this absorbs fp jitter
    if (c > 1.0) c = 1.0;
    state.cdf[j] = c;
    prev = c;
  }
  check_coverage(state.cdf.front(), 1.0 - state.cdf.back(), effective_coverage_eps(cfg));
  return state;
}

double interp_cdf(const GridDistribution& state, double y) {
  const GridSpec& g = state.grid;
  if (y <= g.lo) return state.cdf.front();
  if (y >= g.hi) return state.cdf.back();
  const double pos = (y - g.lo) / g.step();
  int j = static_cast<int>(pos);
  if (j > g.m - 2) j = g.m - 2;
  double f = pos - j;
  // grid nodes return the tabulated value exactly
  if (f < 1e-9) return state.cdf[j];
  if (f > 1.0 - 1e-9) return state.cdf[j + 1];
  return state.cdf[j] + f * (state.cdf[j + 1] - state.cdf[j]);
}

void absorb(GridDistribution& state, double y_obs, const EstimatorConfig& cfg) {
  if (!std::isfinite(y_obs)) throw std::invalid_argument("absorb: observation must be finite");
  validate(cfg);
  const double eps = cfg.clamp_eps;
  const long long n = state.count + 1;
  const double alpha = cfg.weight_a / (n + 1.0);
  const double v = std::clamp(interp_cdf(state, y_obs), eps, 1.0 - eps);
  const double zv_rho = cfg.rho * detail::std_normal_quantile_fast(v);
  const double inv_s = 1.0 / std::sqrt(1.0 - cfg.rho * cfg.rho);
  const double omalpha = 1.0 - alpha;

  double* cdf = state.cdf.data();
  const int m = state.grid.m;
  double prev = 0.0;
  for (int j = 0; j < m; ++j) {
    const double u = cdf[j];
    double h;
    if (u <= 0.0) {
      h = 0.0;
    } else if (u >= 1.0) {
      h = 1.0;
    } else {
      const double uc = std::clamp(u, eps, 1.0 - eps);
      h = std_normal_cdf((detail::std_normal_quantile_fast(uc) - zv_rho) * inv_s);
    }
    double nu = omalpha * u + alpha * h;
    // H is increasing in u, so the blend is monotone; the running max only
    // irons out last-ulp rounding
    if (nu < prev) nu = prev;
    if (nu > 1.0) nu = 1.0;
    cdf[j] = nu;
    prev = nu;
  }
  state.count = n;
  if (y_obs < state.grid.lo || y_obs > state.grid.hi) state.tail_hits += 1;
}

std::vector<double> density(const GridDistribution& state) {
  const int m = state.grid.m;
  const double h = state.grid.step();
  std::vector<double> d(m);
  d[0] = (state.cdf[1] - state.cdf[0]) / h;
  d[m - 1] = (state.cdf[m - 1] - state.cdf[m - 2]) / h;
  for (int j = 1; j < m - 1; ++j) d[j] = (state.cdf[j + 1] - state.cdf[j - 1]) / (2.0 * h);
  return d;
}

double quantile(const GridDistribution& state, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile: q must be in (0,1)");
  const double q_min = state.cdf.front(), q_max = state.cdf.back();
  if (!(q > q_min && q < q_max))
    throw std::out_of_range("quantile: q = " + num_to_string(q) +
                            " outside the achievable range (" + num_to_string(q_min) + ", " +
                            num_to_string(q_max) + ")");
  const auto it = std::lower_bound(state.cdf.begin(), state.cdf.end(), q);
  const int j = static_cast<int>(it - state.cdf.begin());  // first cdf[j] >= q, j >= 1 here
  if (state.cdf[j] == q) return state.grid.point(j);
  const double lo = state.cdf[j - 1], hi = state.cdf[j];
  return state.grid.point(j - 1) + state.grid.step() * (q - lo) / (hi - lo);
}

double mean(const GridDistribution& state) {
  const std::vector<double> d = density(state);
  const int m = state.grid.m;
  const double h = state.grid.step();
  double acc = 0.5 * (state.grid.point(0) * d[0] + state.grid.point(m - 1) * d[m - 1]);
  for (int j = 1; j < m - 1; ++j) acc += state.grid.point(j) * d[j];
  return acc * h;
}

GridDistribution fit_sequence(std::span<const double> ys, const GridSpec& grid,
                              const EstimatorConfig& cfg, int permutations,
                              std::uint64_t seed) {
  if (ys.empty()) throw std::invalid_argument("fit_sequence: no observations");
  if (permutations < 0) throw std::invalid_argument("fit_sequence: permutations must be >= 0");
  const GridDistribution start = init_state(grid, cfg, ys);
  // One observation has one ordering: the permutation average is exactly that run.
  if (permutations == 0 || ys.size() < 2) {
    GridDistribution state = start;
    for (double y : ys) absorb(state, y, cfg);
    return state;
  }
  std::vector<double> acc(grid.m, 0.0);
  GridDistribution first;
  for (int r = 0; r < permutations; ++r) {
    std::vector<double> perm(ys.begin(), ys.end());
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(r));
    shuffle(perm, rng);
    GridDistribution state = start;
    for (double y : perm) absorb(state, y, cfg);
    for (int j = 0; j < grid.m; ++j) acc[j] += state.cdf[j];
    if (r == 0) first = std::move(state);
  }
  // tail hits do not depend on the ordering, so one replica's count is the count
  first.cdf.assign(acc.begin(), acc.end());
  for (double& c : first.cdf) c /= permutations;
  return first;
}

GridSpec default_grid(const EstimatorConfig& cfg, std::span<const double> preview, int m) {
  if (preview.size() >= 2) {
    double mean = 0.0;
    for (double y : preview) mean += y;
    mean /= static_cast<double>(preview.size());
    double ss = 0.0;
    for (double y : preview) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (static_cast<double>(preview.size()) - 1.0));
    if (sd > 0.0) return {mean - 10.0 * sd, mean + 10.0 * sd, m};
  }
  const InitSpec init = resolved_init(cfg.init, preview);
  if (init.family == InitFamily::Cauchy) {
    const double lo = std::max(init_quantile(init, 1e-6), init.center - 500.0 * init.spread);
    const double hi = std::min(init_quantile(init, 1.0 - 1e-6), init.center + 500.0 * init.spread);
    return {lo, hi, m};
  }
  return {init_quantile(init, 1e-6), init_quantile(init, 1.0 - 1e-6), m};
}

BivariateGridDistribution bivariate_init_state(const GridSpec& grid_y, const GridSpec& grid_x,
                                               const EstimatorConfig& cfg,
                                               std::span<const double> preview_y,
                                               std::span<const double> preview_x) {
  validate(grid_y);
  validate(grid_x);
  validate(cfg);
  const InitSpec init_y_spec = resolved_init(cfg.init, preview_y);
  const InitSpec init_x_spec = resolved_init(cfg.init, preview_x);
  std::vector<double> py(grid_y.m), px(grid_x.m);
  for (int j = 0; j < grid_y.m; ++j) py[j] = init_cdf(init_y_spec, grid_y.point(j));
  for (int k = 0; k < grid_x.m; ++k) px[k] = init_cdf(init_x_spec, grid_x.point(k));
  const double bound = effective_coverage_eps(cfg);
  check_coverage(py.front(), 1.0 - py.back(), bound);
  check_coverage(px.front(), 1.0 - px.back(), bound);
  BivariateGridDistribution state;
  state.grid_y = grid_y;
  state.grid_x = grid_x;
  state.cdf.resize(static_cast<std::size_t>(grid_y.m) * grid_x.m);
  for (int j = 0; j < grid_y.m; ++j)
    for (int k = 0; k < grid_x.m; ++k)
      state.cdf[static_cast<std::size_t>(j) * grid_x.m + k] = py[j] * px[k];
  return state;
}

namespace {

// linear weights for an off-grid coordinate, constant beyond the ends
struct AxisPos {
  int j0;
  double frac;
};

AxisPos axis_pos(const GridSpec& g, double y) {
  if (y <= g.lo) return {0, 0.0};
  if (y >= g.hi) return {g.m - 2, 1.0};
  const double pos = (y - g.lo) / g.step();
  int j = static_cast<int>(pos);
  if (j > g.m - 2) j = g.m - 2;
  return {j, pos - j};
}

}  // namespace

void bivariate_absorb(BivariateGridDistribution& state, double y_obs, double x_obs,
                      const EstimatorConfig& cfg) {
  if (!std::isfinite(y_obs) || !std::isfinite(x_obs))
    throw std::invalid_argument("bivariate_absorb: observations must be finite");
  validate(cfg);
  const int my = state.grid_y.m, mx = state.grid_x.m;
  // A joint cdf is a product of two marginal-scale values, so its natural
  // floor is the square of the univariate clamp; clamping at the univariate
  // floor would inflate H(tiny, tiny) factors at the grid corners and leak
  // mass into them on every update. The ceiling sits one ulp below 1 so the
  // quantile stays finite.
  const double eps = std::max(cfg.clamp_eps * cfg.clamp_eps, 1e-300);
  const double ceil = 1.0 - 1e-16;
  const long long n = state.count + 1;
  const double alpha = cfg.weight_a / (n + 1.0);
  const double omalpha = 1.0 - alpha;
  const double inv_s = 1.0 / std::sqrt(1.0 - cfg.rho * cfg.rho);

  // joint cdf with the observation spliced into one coordinate:
  // v_col[k] = P(y_obs, x_k), v_row[j] = P(y_j, x_obs)
  const AxisPos ay = axis_pos(state.grid_y, y_obs);
  const AxisPos ax = axis_pos(state.grid_x, x_obs);
  std::vector<double> zv_col(mx), zv_row(my);
  for (int k = 0; k < mx; ++k) {
    const double v =
        (1.0 - ay.frac) * state.at(ay.j0, k) + ay.frac * state.at(ay.j0 + 1, k);
    zv_col[k] = cfg.rho * detail::std_normal_quantile_fast(std::clamp(v, eps, ceil));
  }
  for (int j = 0; j < my; ++j) {
    const double v =
        (1.0 - ax.frac) * state.at(j, ax.j0) + ax.frac * state.at(j, ax.j0 + 1);
    zv_row[j] = cfg.rho * detail::std_normal_quantile_fast(std::clamp(v, eps, ceil));
  }

  for (int j = 0; j < my; ++j) {
    double* row = state.cdf.data() + static_cast<std::size_t>(j) * mx;
    const double zr = zv_row[j];
    for (int k = 0; k < mx; ++k) {
      const double c = row[k];
      double target;
      if (c <= 0.0) {
        target = 0.0;
      } else if (c >= 1.0) {
        target = 1.0;
      } else {
        const double zc = detail::std_normal_quantile_fast(std::clamp(c, eps, ceil));
        target = std_normal_cdf((zc - zv_col[k]) * inv_s) * std_normal_cdf((zc - zr) * inv_s);
      }
      double nu = omalpha * c + alpha * target;
      if (nu < 0.0) nu = 0.0;
      if (nu > 1.0) nu = 1.0;
      row[k] = nu;
    }
  }

  // the two-factor target is not provably monotone; report decreases
  long long bad = 0;
  for (int j = 0; j < my; ++j) {
    const double* row = state.cdf.data() + static_cast<std::size_t>(j) * mx;
    for (int k = 0; k + 1 < mx; ++k)
      if (row[k] - row[k + 1] > 1e-12) ++bad;
  }
  for (int k = 0; k < mx; ++k)
    for (int j = 0; j + 1 < my; ++j)
      if (state.at(j, k) - state.at(j + 1, k) > 1e-12) ++bad;
  state.mono_violations += bad;

  state.count = n;
  if (y_obs < state.grid_y.lo || y_obs > state.grid_y.hi || x_obs < state.grid_x.lo ||
      x_obs > state.grid_x.hi)
    state.tail_hits += 1;
}

}  // namespace copred
