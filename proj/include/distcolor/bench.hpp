#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "distcolor/config.hpp"
#include "distcolor/graph_io.hpp"
#include "distcolor/metrics.hpp"
#include "distcolor/protocol.hpp"
#include "distcolor/recolor.hpp"
#include "distcolor/rmat.hpp"

namespace distcolor {

/// Loads or generates the graph a config names. RMAT sources take the run
/// seed unless the source carries its own.
inline Graph load_graph(const GraphSource& src) {
  switch (src.kind) {
    case GraphSource::Kind::MatrixMarket: {
      std::ifstream in(src.path);
      if (!in) throw ParseError("cannot open graph file: " + src.path);
      return load_matrix_market(in);
    }
    case GraphSource::Kind::EdgeList: {
      std::ifstream in(src.path);
      if (!in) throw ParseError("cannot open graph file: " + src.path);
      return load_edge_list(in);
    }
    case GraphSource::Kind::Rmat:
      return generate_rmat(src.rmat);
  }
  throw ValidationError("unknown graph source");
}

inline Partition load_partition(const PartitionSource& src, const Graph& g) {
  if (src.kind == PartitionSource::Kind::Block)
    return block_partition(g, src.num_ranks);
  std::ifstream in(src.path);
  if (!in) throw ParseError("cannot open partition file: " + src.path);
  // Rank count = max owner + 1 unless declared; the file fixes ownership.
  std::vector<std::string> lines;
  std::string line;
  RankId max_owner = 0;
  std::stringstream buffer;
  buffer << in.rdbuf();
  {
    std::istringstream scan(buffer.str());
    while (std::getline(scan, line)) {
      if (line.empty()) continue;
      const long r = std::atol(line.c_str());
      if (r >= 0) max_owner = std::max<RankId>(max_owner, static_cast<RankId>(r));
    }
  }
  std::istringstream replay(buffer.str());
  return load_partition_file(replay, g, max_owner + 1);
}

struct RunOutcome {
  Coloring coloring;
  RunMetrics metrics;
};

/// Initial protocol coloring plus the configured recoloring passes, with
/// merged traffic accounting and the color-count trajectory.
inline RunOutcome execute_run(const Graph& g, const std::vector<RankView>& views,
                              const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ProtocolConfig pcfg;
  pcfg.superstep_size = cfg.superstep_size;
  pcfg.mode = cfg.mode;
  pcfg.ordering = cfg.ordering;
  pcfg.selection = cfg.selection;
  pcfg.seed = cfg.seed;
  pcfg.max_rounds = cfg.max_rounds;
  pcfg.backend = cfg.backend;

  ProtocolResult initial = run_protocol(g, views, pcfg);
  RunOutcome outcome{std::move(initial.coloring), std::move(initial.metrics)};
  outcome.metrics.trajectory.assign(1, outcome.coloring.num_colors());

  if (cfg.recolor_iterations > 0) {
    if (cfg.flavor == RecolorFlavor::Sync) {
      PermutationSchedule schedule = cfg.schedule;
      schedule.iterations = cfg.recolor_iterations;
      RecolorResult rc = recolor_iterations(g, views, outcome.coloring, schedule,
                                            SelectionSpec::first_fit(),
                                            cfg.piggyback, cfg.seed, cfg.backend);
      outcome.coloring = std::move(rc.coloring);
      outcome.metrics.add_traffic(rc.metrics);
      outcome.metrics.trajectory.insert(outcome.metrics.trajectory.end(),
                                        rc.metrics.trajectory.begin() + 1,
                                        rc.metrics.trajectory.end());
    } else {
      // Asynchronous recoloring re-runs the protocol per iteration with a
      // class-derived order; it inherits superstep size and mode.
      SplitRng perm_rng = SplitRng(cfg.seed).stream(0x9e23);
      const RankId p = static_cast<RankId>(views.size());
      for (std::uint32_t i = 1; i <= cfg.recolor_iterations; ++i) {
        const PermutationKind kind = cfg.schedule.random_fires(i)
                                         ? PermutationKind::Random
                                         : cfg.schedule.base;
        const auto sizes = outcome.coloring.class_sizes();
        if (p > 1 && (kind == PermutationKind::NonIncreasing ||
                      kind == PermutationKind::NonDecreasing)) {
          const std::uint64_t n_msgs = 2ULL * (p - 1);
          const std::uint64_t entries = sizes.empty() ? 0 : sizes.size() - 1;
          outcome.metrics.messages += n_msgs;
          outcome.metrics.nonempty_messages += n_msgs;
          outcome.metrics.pairs += n_msgs * entries;
          outcome.metrics.bytes += n_msgs * entries * kPairBytes;
        }
        const auto perm = build_class_permutation(sizes, kind, perm_rng.stream(i));
        RecolorResult rc = recolor_async(g, views, outcome.coloring, perm, pcfg);
        outcome.coloring = std::move(rc.coloring);
        outcome.metrics.add_traffic(rc.metrics);
        outcome.metrics.trajectory.push_back(outcome.coloring.num_colors());
      }
    }
  }
  outcome.metrics.num_colors = outcome.coloring.num_colors();
  outcome.metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

inline RunOutcome execute_run(const RunConfig& cfg) {
  Graph g = load_graph(cfg.graph);
  Partition part = load_partition(cfg.parts, g);
  auto views = build_rank_views(g, part);
  return execute_run(g, views, cfg);
}

// ---- sweep ---------------------------------------------------------------

struct SeedOutcome {
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// One sweep cell = (graph, config); carries every seed's metrics plus the
/// arithmetic per-metric mean over the successful seeds.
struct SweepRecord {
  std::string graph_id;
  std::string config_id;
  std::vector<SeedOutcome> seeds;

  double mean(auto extract) const {
    double acc = 0;
    std::uint64_t k = 0;
    for (const auto& s : seeds)
      if (s.ok()) { acc += static_cast<double>(extract(s.metrics)); ++k; }
    return k == 0 ? 0.0 : acc / static_cast<double>(k);
  }
};

/// Runs configs x seeds. Graphs and rank views are cached across cells;
/// failed runs annotate their seed row instead of aborting the sweep.
inline std::vector<SweepRecord> sweep(const std::vector<RunConfig>& cells,
                                      const std::vector<std::uint64_t>& seeds) {
  if (cells.empty() || seeds.empty())
    throw ValidationError("sweep: empty grid");
  std::map<std::string, std::unique_ptr<Graph>> graphs;
  std::map<std::pair<std::string, std::string>, std::vector<RankView>> views;

  std::vector<SweepRecord> records;
  records.reserve(cells.size());
  for (const RunConfig& cell : cells) {
    SweepRecord record;
    record.graph_id = cell.graph.id();
    record.config_id = cell.config_id();
    auto git = graphs.find(record.graph_id);
    try {
      if (git == graphs.end())
        git = graphs.emplace(record.graph_id,
                             std::make_unique<Graph>(load_graph(cell.graph))).first;
      const Graph& g = *git->second;
      auto vkey = std::make_pair(record.graph_id, cell.parts.id());
      auto vit = views.find(vkey);
      if (vit == views.end()) {
        Partition part = load_partition(cell.parts, g);
        vit = views.emplace(vkey, build_rank_views(g, part)).first;
      }
      for (std::uint64_t seed : seeds) {
        RunConfig run = cell;
        run.seed = seed;
        SeedOutcome out;
        out.seed = seed;
        try {
          out.metrics = execute_run(g, vit->second, run).metrics;
        } catch (const Error& e) {
          out.error = e.what();
        }
        record.seeds.push_back(std::move(out));
      }
    } catch (const Error& e) {
      for (std::uint64_t seed : seeds)
        record.seeds.push_back({seed, {}, e.what()});
    }
    records.push_back(std::move(record));
  }
  return records;
}

// ---- serialization -------------------------------------------------------

inline constexpr const char* kMetricsCsvHeader =
    "graph,config,seed,num_colors,rounds,conflicts,msgs,nonempty_msgs,pairs,"
    "bytes,precomm_msgs,ticks";

inline constexpr const char* kTrajectoryCsvHeader =
    "graph,config,seed,iteration,num_colors";

namespace detail {
inline std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

inline void write_metrics_csv_row(std::ostream& out, const std::string& graph_id,
                                  const std::string& config_id,
                                  const std::string& seed_label,
                                  const RunMetrics& m) {
  out << graph_id << ',' << config_id << ',' << seed_label << ','
      << m.num_colors << ',' << m.rounds << ',' << m.conflicts << ','
      << m.messages << ',' << m.nonempty_messages << ',' << m.pairs << ','
      << m.bytes << ',' << m.precomm_messages << ',' << m.ticks << '\n';
}

/// Per-seed rows, then one mean row per (graph, config). Error rows leave
/// the metric fields empty.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kMetricsCsvHeader << '\n';
  for (const auto& rec : records) {
    for (const auto& s : rec.seeds) {
      if (!s.ok()) {
        out << rec.graph_id << ',' << rec.config_id << ',' << s.seed
            << ",,,,,,,,,\n";
        continue;
      }
      write_metrics_csv_row(out, rec.graph_id, rec.config_id,
                            std::to_string(s.seed), s.metrics);
    }
    out << rec.graph_id << ',' << rec.config_id << ",mean,"
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.num_colors; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.rounds; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.conflicts; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.messages; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.nonempty_messages; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.pairs; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.bytes; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.precomm_messages; })) << ','
        << detail::format_double(rec.mean([](const RunMetrics& m) { return m.ticks; })) << '\n';
  }
}

inline nlohmann::json metrics_to_json(const RunMetrics& m) {
  return {{"num_colors", m.num_colors},
          {"rounds", m.rounds},
          {"conflicts", m.conflicts},
          {"msgs", m.messages},
          {"nonempty_msgs", m.nonempty_messages},
          {"pairs", m.pairs},
          {"bytes", m.bytes},
          {"precomm_msgs", m.precomm_messages},
          {"ticks", m.ticks}};
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRecord>& records) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json row;
    row["graph"] = rec.graph_id;
    row["config"] = rec.config_id;
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& s : rec.seeds) {
      nlohmann::json sj;
      sj["seed"] = s.seed;
      if (s.ok()) sj.update(metrics_to_json(s.metrics));
      else sj["error"] = s.error;
      per_seed.push_back(std::move(sj));
    }
    row["seeds"] = std::move(per_seed);
    row["mean"] = {
        {"num_colors", rec.mean([](const RunMetrics& m) { return m.num_colors; })},
        {"rounds", rec.mean([](const RunMetrics& m) { return m.rounds; })},
        {"conflicts", rec.mean([](const RunMetrics& m) { return m.conflicts; })},
        {"msgs", rec.mean([](const RunMetrics& m) { return m.messages; })},
        {"nonempty_msgs", rec.mean([](const RunMetrics& m) { return m.nonempty_messages; })},
        {"pairs", rec.mean([](const RunMetrics& m) { return m.pairs; })},
        {"bytes", rec.mean([](const RunMetrics& m) { return m.bytes; })},
        {"precomm_msgs", rec.mean([](const RunMetrics& m) { return m.precomm_messages; })},
        {"ticks", rec.mean([](const RunMetrics& m) { return m.ticks; })}};
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<SweepRecord>& records) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& rec : records)
    for (const auto& s : rec.seeds) {
      if (!s.ok()) continue;
      for (std::size_t i = 0; i < s.metrics.trajectory.size(); ++i)
        out << rec.graph_id << ',' << rec.config_id << ',' << s.seed << ','
            << i << ',' << s.metrics.trajectory[i] << '\n';
    }
}

/// Normalization summary: per-config geometric mean over graphs of each
/// metric normalized by the same graph's Natural/FirstFit p=1 value.
inline nlohmann::json normalized_summary(const std::vector<SweepRecord>& records,
                                         const std::map<std::string, RunMetrics>& baselines) {
  std::vector<RawRecord> raw;
  std::map<std::pair<std::string, std::string>, double> base;
  for (const auto& [graph_id, m] : baselines) {
    base[{graph_id, "num_colors"}] = static_cast<double>(m.num_colors);
    base[{graph_id, "ticks"}] = std::max<double>(1.0, static_cast<double>(m.ticks));
  }
  for (const auto& rec : records) {
    raw.push_back({rec.graph_id, rec.config_id, "num_colors",
                   rec.mean([](const RunMetrics& m) { return m.num_colors; })});
    raw.push_back({rec.graph_id, rec.config_id, "ticks",
                   std::max(1.0, rec.mean([](const RunMetrics& m) { return m.ticks; }))});
  }
  auto normalized = normalize(raw, base);

  // Geometric mean per (config, metric) across graphs.
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& n : normalized)
    groups[{n.config_id, n.metric}].push_back(n.normalized);
  nlohmann::json out;
  nlohmann::json per_record = nlohmann::json::array();
  for (const auto& n : normalized)
    per_record.push_back({{"graph", n.graph_id},
                          {"config", n.config_id},
                          {"metric", n.metric},
                          {"raw", n.raw},
                          {"baseline", n.baseline},
                          {"normalized", n.normalized}});
  out["records"] = std::move(per_record);
  nlohmann::json agg = nlohmann::json::array();
  for (const auto& [key, values] : groups)
    agg.push_back({{"config", key.first},
                   {"metric", key.second},
                   {"geo_mean", geo_mean(values)}});
  out["aggregates"] = std::move(agg);
  return out;
}

}  // namespace distcolor
