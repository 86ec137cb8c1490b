#include "copred/snapshot.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "copred/format.hpp"

namespace copred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_ll(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  throw std::invalid_argument("snapshot line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Snapshot make_snapshot(const GridDistribution& state, const EstimatorConfig& config) {
  if (config.init.family == InitFamily::EmpiricalBayesNormal)
    throw std::invalid_argument(
        "make_snapshot: resolve the empirical-Bayes init before snapshotting");
  Snapshot snap;
  snap.rho = config.rho;
  snap.weight_a = config.weight_a;
  snap.clamp_eps = config.clamp_eps;
  snap.init = init_to_string(config.init);
  snap.count = state.count;
  snap.tail_hits = state.tail_hits;
  snap.grid_points.resize(state.grid.m);
  for (int j = 0; j < state.grid.m; ++j) snap.grid_points[j] = state.grid.point(j);
  snap.cdf = state.cdf;
  snap.density = density(state);
  return snap;
}

void write_snapshot(std::ostream& out, const Snapshot& snap,
                    const std::vector<std::string>& extra_comments) {
  const std::size_t m = snap.grid_points.size();
  if (snap.cdf.size() != m || snap.density.size() != m)
    throw std::invalid_argument("write_snapshot: column lengths differ");
  out << "# copred snapshot v1\n";
  out << "# rho: " << format_double(snap.rho) << '\n';
  out << "# weight_a: " << format_double(snap.weight_a) << '\n';
  out << "# count: " << snap.count << '\n';
  out << "# clamp_eps: " << format_double(snap.clamp_eps) << '\n';
  out << "# init: " << snap.init << '\n';
  out << "# tail_hits: " << snap.tail_hits << '\n';
  for (const auto& line : extra_comments) out << "# " << line << '\n';
  out << "grid_point,cdf,density\n";
  for (std::size_t j = 0; j < m; ++j)
    out << format_double(snap.grid_points[j]) << ',' << format_double(snap.cdf[j]) << ','
        << format_double(snap.density[j]) << '\n';
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  bool seen_rho = false, seen_a = false, seen_count = false, seen_eps = false,
       seen_init = false, seen_tails = false, seen_table_header = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      line = trim(line);
      const std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) continue;  // plain comment
      const std::string_view key = trim(line.substr(0, colon));
      const std::string_view value = trim(line.substr(colon + 1));
      bool ok = true;
      if (key == "rho" && !seen_rho)
        ok = parse_double(value, snap.rho), seen_rho = true;
      else if (key == "weight_a" && !seen_a)
        ok = parse_double(value, snap.weight_a), seen_a = true;
      else if (key == "count" && !seen_count)
        ok = parse_ll(value, snap.count), seen_count = true;
      else if (key == "clamp_eps" && !seen_eps)
        ok = parse_double(value, snap.clamp_eps), seen_eps = true;
      else if (key == "init" && !seen_init)
        snap.init = std::string(value), seen_init = true;
      else if (key == "tail_hits" && !seen_tails)
        ok = parse_ll(value, snap.tail_hits), seen_tails = true;
      if (!ok) fail_line(line_no, "unreadable value for header field '" + std::string(key) + "'");
      continue;
    }
    if (!seen_table_header) {
      if (line != "grid_point,cdf,density")
        fail_line(line_no, "expected table header 'grid_point,cdf,density'");
      seen_table_header = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      fail_line(line_no, "expected three comma-separated fields");
    double g, c, d;
    if (!parse_double(line.substr(0, c1), g) ||
        !parse_double(line.substr(c1 + 1, c2 - c1 - 1), c) || !parse_double(line.substr(c2 + 1), d))
      fail_line(line_no, "unreadable number");
    snap.grid_points.push_back(g);
    snap.cdf.push_back(c);
    snap.density.push_back(d);
  }
  if (!seen_rho || !seen_a || !seen_count || !seen_eps || !seen_init || !seen_tails)
    throw std::invalid_argument(
        "snapshot: missing header field (need rho, weight_a, count, clamp_eps, init, tail_hits)");
  if (!seen_table_header || snap.grid_points.empty())
    throw std::invalid_argument("snapshot: no data rows");
  return snap;
}

std::pair<GridDistribution, EstimatorConfig> snapshot_to_state(const Snapshot& snap) {
  EstimatorConfig cfg;
  cfg.rho = snap.rho;
  cfg.weight_a = snap.weight_a;
  cfg.clamp_eps = snap.clamp_eps;
  cfg.init = init_from_string(snap.init);
  validate(cfg);

  const std::size_t m = snap.grid_points.size();
  if (snap.cdf.size() != m || snap.density.size() != m)
    throw std::invalid_argument("snapshot: column lengths differ");
  GridDistribution state;
  state.grid = GridSpec{snap.grid_points.front(), snap.grid_points.back(),
                        static_cast<int>(m)};
  validate(state.grid);
  const double step = state.grid.step();
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(state.grid.point(static_cast<int>(j)) - snap.grid_points[j]) > 1e-6 * step)
      throw std::invalid_argument("snapshot: grid is not uniform");
    const double c = snap.cdf[j];
    if (!(c >= 0.0 && c <= 1.0))
      throw std::invalid_argument("snapshot: cdf values must lie in [0,1]");
    if (j > 0 && c < snap.cdf[j - 1])
      throw std::invalid_argument("snapshot: cdf must be nondecreasing");
  }
  if (snap.count < 0 || snap.tail_hits < 0)
    throw std::invalid_argument("snapshot: counts must be nonnegative");
  state.cdf = snap.cdf;
  state.count = snap.count;
  state.tail_hits = snap.tail_hits;
  return {std::move(state), cfg};
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string fnv1a64_to_hex(std::uint64_t state) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state));
  return buf;
}

std::string fnv1a64_hex(std::string_view bytes) { return fnv1a64_to_hex(fnv1a64(bytes)); }

std::string manifest_to_string(const RunManifest& manifest) {
  std::string out;
  out += "command: " + manifest.command + '\n';
  out += "version: " + manifest.version + '\n';
  out += "seed: " + std::to_string(manifest.seed) + '\n';
  out += "input_digest: " + manifest.input_digest + '\n';
  for (const auto& [key, value] : manifest.config) out += key + ": " + value + '\n';
  return out;
}

}  // namespace copred
