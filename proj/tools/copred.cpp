// copred: streaming nonparametric predictive distributions.
//
// Subcommands:
//   fit        fold observations through the recursive copula update, emit a
//              state snapshot plus a summary
//   quantiles  invert a snapshot's cdf at requested probabilities
//   simulate   recursive estimator vs KDE baseline vs truth on synthetic
//              t-mixture data (batch or sequential scoring)
//   verify     run the built-in identity suites
//
// Exit codes: 0 success, 1 domain/validation error, 2 verification failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "copred/estimator.hpp"
#include "copred/eval.hpp"
#include "copred/format.hpp"
#include "copred/snapshot.hpp"
#include "copred/verify.hpp"
#include "copred/version.hpp"

namespace {

using namespace copred;

// ---------------------------------------------------------------- helpers

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim_view(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

struct RunningStats {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / (static_cast<double>(n) - 1.0) : 0.0; }
};

// Reads one observation per line ('y' or, bivariate, 'y,x'); '#' lines and
// blank lines are skipped but still hashed. Returns the observation count.
template <class Sink>
long long for_each_observation(std::istream& in, bool bivariate, std::uint64_t* hash,
                               Sink&& sink) {
  std::string raw;
  long long line_no = 0, n = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (hash) *hash = fnv1a64("\n", fnv1a64(raw, *hash));
    const std::string_view line = trim_view(raw);
    if (line.empty() || line.front() == '#') continue;
    double y = 0.0, x = 0.0;
    if (bivariate) {
      const std::size_t c = line.find(',');
      if (c == std::string_view::npos || !parse_number(line.substr(0, c), y) ||
          !parse_number(line.substr(c + 1), x))
        throw std::invalid_argument("input line " + std::to_string(line_no) +
                                    ": expected 'y,x', got '" + std::string(line) + "'");
    } else if (!parse_number(line, y)) {
      throw std::invalid_argument("input line " + std::to_string(line_no) +
                                  ": cannot parse '" + std::string(line) + "' as a number");
    }
    sink(y, x);
    ++n;
  }
  return n;
}

GridSpec parse_grid_flag(const std::string& text) {
  const std::size_t c1 = text.find(',');
  const std::size_t c2 = c1 == std::string::npos ? c1 : text.find(',', c1 + 1);
  double lo = 0.0, hi = 0.0, m_real = 0.0;
  if (c2 == std::string::npos || text.find(',', c2 + 1) != std::string::npos ||
      !parse_number(std::string_view(text).substr(0, c1), lo) ||
      !parse_number(std::string_view(text).substr(c1 + 1, c2 - c1 - 1), hi) ||
      !parse_number(std::string_view(text).substr(c2 + 1), m_real) ||
      m_real != std::floor(m_real))
    throw std::invalid_argument("--grid expects 'lo,hi,m' with integer m, got '" + text + "'");
  GridSpec g{lo, hi, static_cast<int>(m_real)};
  validate(g);
  return g;
}

std::string grid_flag_string(const GridSpec& g) {
  return format_double(g.lo) + "," + format_double(g.hi) + "," + std::to_string(g.m);
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

std::string q_label(double q) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "q%g", q);
  return buf;
}

std::vector<std::string> manifest_lines(const RunManifest& man, const std::string& prefix) {
  std::vector<std::string> out;
  std::istringstream is(manifest_to_string(man));
  std::string line;
  while (std::getline(is, line)) out.push_back(prefix + line);
  return out;
}

void emit_manifest_comments(std::ostream& os, const RunManifest& man) {
  for (const auto& line : manifest_lines(man, "")) os << "# " << line << '\n';
}

void write_sidecar_manifest(const std::string& out_path, const RunManifest& man) {
  const std::string path = out_path + ".manifest";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << manifest_to_string(man);
}

// Opens --out for writing or returns std::cout.
std::ostream& open_output(const std::string& out_path, std::ofstream& file) {
  if (out_path.empty()) return std::cout;
  file.open(out_path);
  if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  return file;
}

void validate_probabilities(const std::vector<double>& qs) {
  if (qs.empty()) throw std::invalid_argument("--q needs at least one probability");
  for (double q : qs)
    if (!(q > 0.0 && q < 1.0))
      throw std::invalid_argument("--q values must lie strictly in (0,1), got " +
                                  format_double(q));
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input = "-";
  std::string out;
  double rho = 0.95;
  double weight_a = 1.0;
  double clamp_eps = 1e-10;
  double coverage_eps = 0.0;  // 0 = automatic
  std::string init_str;       // empty = auto (normal matched to the data)
  std::string grid_str;       // empty = auto
  int permutations = 0;
  std::uint64_t seed = 1;
  std::vector<double> qs;
  bool bivariate = false;
};

std::ifstream open_input_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open input '" + path + "'");
  return f;
}

void emit_univariate_summary(const GridDistribution& state, const std::vector<double>& qs) {
  std::string header = "count,tail_hits,mean";
  std::string row = std::to_string(state.count) + "," + std::to_string(state.tail_hits) +
                    "," + format_double(mean(state));
  for (double q : qs) {
    header += "," + q_label(q);
    row += ",";
    try {
      row += format_double(quantile(state, q));
    } catch (const std::out_of_range&) {
      // outside the achievable cdf range on this grid: leave the cell empty
    }
  }
  std::cerr << header << '\n' << row << '\n';
}

int run_fit_univariate(const FitArgs& args) {
  InitSpec requested;
  const bool auto_init = args.init_str.empty();
  if (!auto_init) requested = init_from_string(args.init_str);
  const bool eb_init = !auto_init && requested.family == InitFamily::EmpiricalBayesNormal;
  const bool auto_grid = args.grid_str.empty();
  const bool need_stats = auto_init || eb_init || auto_grid;
  const bool from_stdin = args.input == "-";
  const bool buffer = args.permutations > 0 || (from_stdin && need_stats);

  std::vector<double> ys;
  RunningStats stats;
  std::uint64_t digest = kFnvOffsetBasis;
  bool hashed = false;

  if (buffer) {
    auto sink = [&](double y, double) {
      ys.push_back(y);
      stats.add(y);
    };
    if (from_stdin)
      for_each_observation(std::cin, false, &digest, sink);
    else {
      std::ifstream f = open_input_file(args.input);
      for_each_observation(f, false, &digest, sink);
    }
    hashed = true;
    if (ys.empty()) throw std::invalid_argument("no observations in input");
  } else if (need_stats) {
    std::ifstream f = open_input_file(args.input);
    for_each_observation(f, false, nullptr, [&](double y, double) { stats.add(y); });
    if (stats.n == 0) throw std::invalid_argument("no observations in input");
  }

  EstimatorConfig cfg;
  cfg.rho = args.rho;
  cfg.weight_a = args.weight_a;
  cfg.clamp_eps = args.clamp_eps;
  cfg.coverage_eps = args.coverage_eps;
  if (auto_init)
    cfg.init = normal_init(stats.mean, stats.variance() > 0.0 ? stats.variance() : 1.0);
  else if (eb_init)
    cfg.init = normal_init(stats.mean, requested.spread);
  else
    cfg.init = requested;

  GridSpec grid;
  if (!auto_grid)
    grid = parse_grid_flag(args.grid_str);
  else if (stats.n >= 2 && stats.variance() > 0.0) {
    const double sd = std::sqrt(stats.variance());
    grid = GridSpec{stats.mean - 10.0 * sd, stats.mean + 10.0 * sd, 1024};
  } else {
    grid = default_grid(cfg, {}, 1024);
  }

  GridDistribution state;
  if (args.permutations > 0) {
    state = fit_sequence(ys, grid, cfg, args.permutations, args.seed);
  } else if (buffer) {
    state = init_state(grid, cfg);
    for (double y : ys) absorb(state, y, cfg);
  } else {
    state = init_state(grid, cfg);
    if (from_stdin) {
      for_each_observation(std::cin, false, &digest,
                           [&](double y, double) { absorb(state, y, cfg); });
    } else {
      std::ifstream f = open_input_file(args.input);
      for_each_observation(f, false, &digest, [&](double y, double) { absorb(state, y, cfg); });
    }
    hashed = true;
    if (state.count == 0) throw std::invalid_argument("no observations in input");
  }
  (void)hashed;

  const std::vector<double> qs = args.qs.empty() ? default_check_quantiles() : args.qs;

  RunManifest man;
  man.command = "fit";
  man.version = kVersion;
  man.seed = args.seed;
  man.input_digest = fnv1a64_to_hex(digest);
  man.config = {
      {"input", args.input},
      {"bivariate", "false"},
      {"rho", format_double(cfg.rho)},
      {"weight_a", format_double(cfg.weight_a)},
      {"clamp_eps", format_double(cfg.clamp_eps)},
      {"coverage_eps", format_double(effective_coverage_eps(cfg))},
      {"init", init_to_string(cfg.init)},
      {"init_requested", auto_init ? std::string("auto") : args.init_str},
      {"grid", grid_flag_string(grid)},
      {"permutations", std::to_string(args.permutations)},
      {"q", join_numbers(qs)},
  };

  const Snapshot snap = make_snapshot(state, cfg);
  std::ofstream out_file;
  std::ostream& out = open_output(args.out, out_file);
  write_snapshot(out, snap, manifest_lines(man, "manifest."));
  out.flush();
  if (!args.out.empty()) write_sidecar_manifest(args.out, man);

  emit_univariate_summary(state, qs);
  return 0;
}

int run_fit_bivariate(const FitArgs& args) {
  if (args.permutations > 0)
    throw std::invalid_argument("permutation averaging applies to univariate fits only");

  std::vector<double> ys, xs;
  RunningStats stats_y, stats_x;
  std::uint64_t digest = kFnvOffsetBasis;
  auto sink = [&](double y, double x) {
    ys.push_back(y);
    xs.push_back(x);
    stats_y.add(y);
    stats_x.add(x);
  };
  if (args.input == "-")
    for_each_observation(std::cin, true, &digest, sink);
  else {
    std::ifstream f = open_input_file(args.input);
    for_each_observation(f, true, &digest, sink);
  }
  if (ys.empty()) throw std::invalid_argument("no observations in input");

  EstimatorConfig cfg;
  cfg.rho = args.rho;
  cfg.weight_a = args.weight_a;
  cfg.clamp_eps = args.clamp_eps;
  cfg.coverage_eps = args.coverage_eps;
  const bool auto_init = args.init_str.empty();
  if (auto_init) {
    // per-axis centers via the empirical-Bayes path; shared pooled variance
    const double pooled = 0.5 * (stats_y.variance() + stats_x.variance());
    cfg.init = eb_normal_init(pooled > 0.0 ? pooled : 1.0);
  } else {
    cfg.init = init_from_string(args.init_str);
  }

  auto axis_grid = [&](const RunningStats& s) {
    if (!args.grid_str.empty()) return parse_grid_flag(args.grid_str);
    if (s.n >= 2 && s.variance() > 0.0) {
      const double sd = std::sqrt(s.variance());
      return GridSpec{s.mean - 10.0 * sd, s.mean + 10.0 * sd, 256};
    }
    return default_grid(cfg, {}, 256);
  };
  const GridSpec grid_y = axis_grid(stats_y);
  const GridSpec grid_x = axis_grid(stats_x);

  BivariateGridDistribution state = bivariate_init_state(grid_y, grid_x, cfg, ys, xs);
  for (std::size_t i = 0; i < ys.size(); ++i) bivariate_absorb(state, ys[i], xs[i], cfg);

  auto resolved_axis_init = [&](std::span<const double> preview) {
    return init_to_string(resolved_init(cfg.init, preview));
  };
  const std::string init_y = resolved_axis_init(ys);
  const std::string init_x = resolved_axis_init(xs);

  RunManifest man;
  man.command = "fit";
  man.version = kVersion;
  man.seed = args.seed;
  man.input_digest = fnv1a64_to_hex(digest);
  man.config = {
      {"input", args.input},
      {"bivariate", "true"},
      {"rho", format_double(cfg.rho)},
      {"weight_a", format_double(cfg.weight_a)},
      {"clamp_eps", format_double(cfg.clamp_eps)},
      {"coverage_eps", format_double(effective_coverage_eps(cfg))},
      {"init_y", init_y},
      {"init_x", init_x},
      {"init_requested", auto_init ? std::string("auto") : args.init_str},
      {"grid_y", grid_flag_string(grid_y)},
      {"grid_x", grid_flag_string(grid_x)},
  };

  std::ofstream out_file;
  std::ostream& out = open_output(args.out, out_file);
  out << "# copred bivariate snapshot v1\n";
  out << "# rho: " << format_double(cfg.rho) << '\n';
  out << "# weight_a: " << format_double(cfg.weight_a) << '\n';
  out << "# count: " << state.count << '\n';
  out << "# clamp_eps: " << format_double(cfg.clamp_eps) << '\n';
  out << "# init_y: " << init_y << '\n';
  out << "# init_x: " << init_x << '\n';
  out << "# tail_hits: " << state.tail_hits << '\n';
  out << "# mono_violations: " << state.mono_violations << '\n';
  out << "# grid_y: " << grid_flag_string(grid_y) << '\n';
  out << "# grid_x: " << grid_flag_string(grid_x) << '\n';
  for (const auto& line : manifest_lines(man, "manifest.")) out << "# " << line << '\n';
  out << "y_index,x_index,y,x,cdf\n";
  for (int j = 0; j < grid_y.m; ++j)
    for (int k = 0; k < grid_x.m; ++k)
      out << j << ',' << k << ',' << format_double(grid_y.point(j)) << ','
          << format_double(grid_x.point(k)) << ',' << format_double(state.at(j, k)) << '\n';
  out.flush();
  if (!args.out.empty()) write_sidecar_manifest(args.out, man);

  std::cerr << "count,tail_hits,mono_violations\n"
            << state.count << ',' << state.tail_hits << ',' << state.mono_violations << '\n';
  return 0;
}

int run_fit(const FitArgs& args) {
  return args.bivariate ? run_fit_bivariate(args) : run_fit_univariate(args);
}

// ---------------------------------------------------------------- quantiles

struct QuantilesArgs {
  std::string snapshot = "-";
  std::string out;
  std::vector<double> qs;
};

int run_quantiles(const QuantilesArgs& args) {
  std::string bytes;
  if (args.snapshot == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    bytes = buf.str();
  } else {
    std::ifstream f = open_input_file(args.snapshot);
    std::ostringstream buf;
    buf << f.rdbuf();
    bytes = buf.str();
  }
  std::istringstream in(bytes);
  const Snapshot snap = read_snapshot(in);
  const auto [state, cfg] = snapshot_to_state(snap);

  const std::vector<double> qs = args.qs.empty() ? default_check_quantiles() : args.qs;

  RunManifest man;
  man.command = "quantiles";
  man.version = kVersion;
  man.seed = 0;
  man.input_digest = fnv1a64_hex(bytes);
  man.config = {
      {"snapshot", args.snapshot},
      {"q", join_numbers(qs)},
  };

  std::ofstream out_file;
  std::ostream& out = open_output(args.out, out_file);
  emit_manifest_comments(out, man);
  out << "q,action,error\n";
  bool any_error = false;
  for (double q : qs) {
    out << format_double(q) << ',';
    try {
      out << format_double(quantile(state, q)) << ",\n";
    } catch (const std::out_of_range& e) {
      any_error = true;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << ",\"" << msg << "\"\n";
    }
  }
  out.flush();
  if (!args.out.empty()) write_sidecar_manifest(args.out, man);
  return any_error ? 1 : 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mode = "batch";
  std::string out;
  int trials = 500;
  int n = 50;
  int prime = 4;
  int oracle_mc = 100000;
  std::uint64_t seed = 1;
  double rho = 0.95;
  double weight_a = 1.0;
  double clamp_eps = 1e-10;
  double coverage_eps = 0.0;
  std::string init_str = "cauchy:0,1";
  std::string grid_str;  // empty = -500,500,2048
  std::vector<double> qs;
};

int run_simulate(const SimulateArgs& args) {
  const bool sequential = args.mode == "sequential";
  EstimatorConfig cfg;
  cfg.rho = args.rho;
  cfg.weight_a = args.weight_a;
  cfg.clamp_eps = args.clamp_eps;
  cfg.coverage_eps = args.coverage_eps;
  cfg.init = init_from_string(args.init_str);
  if (cfg.init.family == InitFamily::EmpiricalBayesNormal)
    throw std::invalid_argument("simulate needs a data-independent init (normal or cauchy)");
  const GridSpec grid =
      args.grid_str.empty() ? GridSpec{-500.0, 500.0, 2048} : parse_grid_flag(args.grid_str);

  std::vector<double> qs = args.qs;
  if (qs.empty()) qs = sequential ? std::vector<double>{0.1} : default_check_quantiles();
  validate_probabilities(qs);

  SimulationDesign design;
  design.n_obs = args.n;
  design.n_trials = args.trials;
  design.oracle_mc = args.oracle_mc;
  design.seed = args.seed;
  design.prime = args.prime;

  const std::vector<TrialRow> rows = sequential ? run_sequential_study(design, qs, cfg, grid)
                                                : run_batch_study(design, qs, cfg, grid);

  RunManifest man;
  man.command = "simulate";
  man.version = kVersion;
  man.seed = args.seed;
  man.input_digest = fnv1a64_hex("");  // no input data
  man.config = {
      {"mode", args.mode},
      {"trials", std::to_string(args.trials)},
      {"n", std::to_string(args.n)},
      {"prime", std::to_string(args.prime)},
      {"oracle_mc", std::to_string(args.oracle_mc)},
      {"rho", format_double(cfg.rho)},
      {"weight_a", format_double(cfg.weight_a)},
      {"clamp_eps", format_double(cfg.clamp_eps)},
      {"coverage_eps", format_double(effective_coverage_eps(cfg))},
      {"init", args.init_str},
      {"grid", grid_flag_string(grid)},
      {"q", join_numbers(qs)},
  };

  std::ofstream out_file;
  std::ostream& out = open_output(args.out, out_file);
  emit_manifest_comments(out, man);
  out << "trial,q,delta_q,loss_rec,loss_base,loss_truth\n";
  for (const TrialRow& r : rows)
    out << r.trial << ',' << format_double(r.q) << ',' << format_double(r.delta) << ','
        << format_double(r.loss_rec) << ',' << format_double(r.loss_base) << ','
        << format_double(r.loss_truth) << '\n';

  out << "# aggregate\n";
  out << (sequential ? "q,mean,median,sd,pr_negative\n" : "q,mean,median,sd\n");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    std::vector<double> deltas;
    deltas.reserve(static_cast<std::size_t>(args.trials));
    for (std::size_t t = 0; t < static_cast<std::size_t>(args.trials); ++t)
      deltas.push_back(rows[t * qs.size() + i].delta);
    const DeltaAggregate agg = aggregate_deltas(deltas);
    out << format_double(qs[i]) << ',' << format_double(agg.mean) << ','
        << format_double(agg.median) << ',' << format_double(agg.sd);
    if (sequential) out << ',' << format_double(agg.pr_negative);
    out << '\n';
  }
  out.flush();
  if (!args.out.empty()) write_sidecar_manifest(args.out, man);
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string suite;  // empty = all
  std::uint64_t seed = 1;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  std::vector<VerifyReport> reports;
  if (args.suite.empty() || args.suite == "copulas") reports.push_back(verify_copulas());
  if (args.suite.empty() || args.suite == "exact") reports.push_back(verify_exact(args.seed));
  if (args.suite.empty() || args.suite == "consistency")
    reports.push_back(verify_consistency(args.seed));

  RunManifest man;
  man.command = "verify";
  man.version = kVersion;
  man.seed = args.seed;
  man.input_digest = fnv1a64_hex("");
  man.config = {{"suite", args.suite.empty() ? std::string("all") : args.suite}};

  std::ofstream out_file;
  std::ostream& out = open_output(args.out, out_file);
  emit_manifest_comments(out, man);
  out << "suite,check,measured,tolerance,status\n";
  bool all_pass = true;
  for (const VerifyReport& report : reports) {
    for (const VerifyCheck& check : report.checks) {
      all_pass = all_pass && check.pass;
      out << report.suite << ',' << check.name << ',' << format_double(check.measured) << ','
          << format_double(check.tolerance) << ',' << (check.pass ? "PASS" : "FAIL") << '\n';
    }
  }
  out.flush();
  if (!args.out.empty()) write_sidecar_manifest(args.out, man);
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming nonparametric predictive distributions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "fold observations into a predictive distribution snapshot");
  fit->add_option("input", fit_args.input,
                  "observations file, one per line ('-' = stdin; '#' comments)")
      ->capture_default_str();
  fit->add_option("--rho", fit_args.rho, "copula correlation in (0,1)")->capture_default_str();
  fit->add_option("--weight-a", fit_args.weight_a, "step-size numerator a, alpha_n = a/(n+1)")
      ->capture_default_str();
  fit->add_option("--clamp-eps", fit_args.clamp_eps,
                  "cdf clamp before the normal quantile, in (0, 0.01]")
      ->capture_default_str();
  fit->add_option("--coverage-eps", fit_args.coverage_eps,
                  "max init mass allowed off-grid (0 = auto: 1e-6, cauchy 1e-3)")
      ->capture_default_str();
  fit->add_option("--init", fit_args.init_str,
                  "initial guess: normal:mean,var | cauchy:loc,scale | eb-normal:var")
      ->default_str("auto (normal matched to the data)");
  fit->add_option("--grid", fit_args.grid_str, "evaluation grid 'lo,hi,m' (use --grid=lo,hi,m)")
      ->default_str("auto (data mean +- 10 sd, m=1024)");
  fit->add_option("--permutations", fit_args.permutations,
                  "average this many random data orderings (0 = stream order)")
      ->capture_default_str();
  fit->add_option("--seed", fit_args.seed, "seed for permutation shuffles")
      ->capture_default_str();
  fit->add_option("--q", fit_args.qs, "summary quantiles (comma separated)")
      ->delimiter(',')
      ->default_str("0.001,0.01,0.1,0.25,0.5,0.75,0.9,0.99,0.999");
  fit->add_flag("--bivariate", fit_args.bivariate, "input lines are 'y,x' pairs");
  fit->add_option("--out", fit_args.out, "snapshot file (default stdout; adds <out>.manifest)");

  QuantilesArgs quant_args;
  CLI::App* quantiles =
      app.add_subcommand("quantiles", "invert a snapshot's cdf at given probabilities");
  quantiles->add_option("snapshot", quant_args.snapshot, "snapshot file ('-' = stdin)")
      ->capture_default_str();
  quantiles->add_option("--q", quant_args.qs, "probabilities (comma separated)")
      ->delimiter(',')
      ->default_str("0.001,0.01,0.1,0.25,0.5,0.75,0.9,0.99,0.999");
  quantiles->add_option("--out", quant_args.out,
                        "output file (default stdout; adds <out>.manifest)");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "score the recursive estimator against a KDE baseline on t-mixture data");
  simulate->add_option("--mode", sim_args.mode, "batch | sequential")
      ->check(CLI::IsMember({"batch", "sequential"}))
      ->capture_default_str();
  simulate->add_option("--trials", sim_args.trials, "number of independent trials")
      ->capture_default_str();
  simulate->add_option("--n", sim_args.n, "observations per trial")->capture_default_str();
  simulate->add_option("--prime", sim_args.prime,
                       "observations absorbed before scoring (sequential mode)")
      ->capture_default_str();
  simulate->add_option("--oracle-mc", sim_args.oracle_mc,
                       "Monte Carlo draws for batch loss evaluation")
      ->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "study seed")->capture_default_str();
  simulate->add_option("--rho", sim_args.rho, "copula correlation")->capture_default_str();
  simulate->add_option("--weight-a", sim_args.weight_a, "step-size numerator")
      ->capture_default_str();
  simulate->add_option("--clamp-eps", sim_args.clamp_eps, "cdf clamp")->capture_default_str();
  simulate->add_option("--coverage-eps", sim_args.coverage_eps,
                       "max init mass allowed off-grid (0 = auto)")
      ->capture_default_str();
  simulate->add_option("--init", sim_args.init_str, "estimator init (data-independent)")
      ->capture_default_str();
  simulate->add_option("--grid", sim_args.grid_str, "estimator grid 'lo,hi,m'")
      ->default_str("-500,500,2048");
  simulate->add_option("--q", sim_args.qs, "check-loss quantiles")
      ->delimiter(',')
      ->default_str("batch: the 9-point default vector; sequential: 0.1");
  simulate->add_option("--out", sim_args.out, "output file (default stdout)");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "run the built-in identity suites");
  verify->add_option("--suite", verify_args.suite, "copulas | exact | consistency")
      ->check(CLI::IsMember({"copulas", "exact", "consistency"}))
      ->default_str("all");
  verify->add_option("--seed", verify_args.seed, "seed for randomized sweeps")
      ->capture_default_str();
  verify->add_option("--out", verify_args.out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*fit) return run_fit(fit_args);
    if (*quantiles) return run_quantiles(quant_args);
    if (*simulate) return run_simulate(sim_args);
    if (*verify) return run_verify(verify_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
