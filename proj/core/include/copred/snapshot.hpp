#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "copred/estimator.hpp"

namespace copred {

// A fitted state as it appears on disk: header fields plus the
// (grid_point, cdf, density) table. `init` holds the resolved initial
// distribution (empirical-Bayes variants are stored with their data-derived
// center filled in).
struct Snapshot {
  double rho = 0.95;
  double weight_a = 1.0;
  double clamp_eps = 1e-10;
  std::string init;
  long long count = 0;
  long long tail_hits = 0;
  std::vector<double> grid_points;
  std::vector<double> cdf;
  std::vector<double> density;
};

Snapshot make_snapshot(const GridDistribution& state, const EstimatorConfig& config);

// Header lines are "# key: value" in the order rho, weight_a, count,
// clamp_eps, init, tail_hits, followed by a CSV table with header row
// "grid_point,cdf,density". Unknown "# " keys are preserved on read only as
// far as being skipped; extra_comments are emitted verbatim after the header.
void write_snapshot(std::ostream& out, const Snapshot& snap,
                    const std::vector<std::string>& extra_comments = {});

// Throws std::invalid_argument naming the offending line on malformed input.
Snapshot read_snapshot(std::istream& in);

// Rebuilds a usable estimator state + config. The grid must be uniform
// (snapshots written by this library always are).
std::pair<GridDistribution, EstimatorConfig> snapshot_to_state(const Snapshot& snap);

// 64-bit FNV-1a content hash, used as the input digest in run manifests.
// Feed chunks by passing the previous return value as `state`.
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffsetBasis);
std::string fnv1a64_to_hex(std::uint64_t state);
std::string fnv1a64_hex(std::string_view bytes);

// Everything needed to reproduce a run: command, tool version, seed, the
// fully resolved configuration, and a digest of the input bytes.
struct RunManifest {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  std::string input_digest;
  std::vector<std::pair<std::string, std::string>> config;
};

// One "key: value" line per field, config entries flattened in order.
std::string manifest_to_string(const RunManifest& manifest);

}  // namespace copred
