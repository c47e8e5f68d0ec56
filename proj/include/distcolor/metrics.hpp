#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distcolor/types.hpp"

namespace distcolor {

struct RoundStats {
  std::uint64_t uncolored_at_start = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t supersteps = 0;         // global superstep slots this round
  std::uint64_t boundary_colored = 0;
};

/// Everything a run reports. Wall-clock is informative only; the
/// machine-independent proxies (messages, supersteps, ticks) carry the
/// communication comparisons.
struct RunMetrics {
  Color num_colors = 0;
  std::uint64_t rounds = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t supersteps = 0;
  std::uint64_t messages = 0;
  std::uint64_t nonempty_messages = 0;
  std::uint64_t pairs = 0;
  std::uint64_t bytes = 0;
  std::uint64_t precomm_messages = 0;
  std::uint64_t ticks = 0;               // scheduler ticks, cost proxy
  std::vector<Color> trajectory;         // color counts per recolor iteration
  std::vector<RoundStats> per_round;
  double wall_seconds = 0.0;

  std::uint64_t empty_messages() const { return messages - nonempty_messages; }

  void add_traffic(const RunMetrics& other) {
    messages += other.messages;
    nonempty_messages += other.nonempty_messages;
    pairs += other.pairs;
    bytes += other.bytes;
    precomm_messages += other.precomm_messages;
    supersteps += other.supersteps;
    ticks += other.ticks;
    conflicts += other.conflicts;
    rounds += other.rounds;
  }
};

/// One normalized measurement: raw value divided by the per-graph baseline
/// (Natural ordering on one rank, per the normalization convention).
struct NormalizedRecord {
  std::string graph_id;
  std::string config_id;
  std::string metric;
  double raw = 0.0;
  double baseline = 0.0;
  double normalized = 0.0;
};

struct RawRecord {
  std::string graph_id;
  std::string config_id;
  std::string metric;
  double value = 0.0;
};

/// Elementwise division by the matching (graph, metric) baseline.
inline std::vector<NormalizedRecord> normalize(
    const std::vector<RawRecord>& records,
    const std::map<std::pair<std::string, std::string>, double>& baselines) {
  std::vector<NormalizedRecord> out;
  out.reserve(records.size());
  for (const RawRecord& r : records) {
    auto it = baselines.find({r.graph_id, r.metric});
    if (it == baselines.end())
      throw ValidationError("normalize: missing baseline for " + r.graph_id + "/" + r.metric);
    if (it->second == 0.0)
      throw ValidationError("normalize: zero baseline for " + r.graph_id + "/" + r.metric);
    out.push_back({r.graph_id, r.config_id, r.metric, r.value, it->second,
                   r.value / it->second});
  }
  return out;
}

/// exp(mean(log x)). All inputs must be positive.
inline double geo_mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("geo_mean: empty input");
  double acc = 0.0;
  for (double v : values) {
    if (v <= 0.0) throw ValidationError("geo_mean: non-positive value");
    acc += std::log(v);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

}  // namespace distcolor
