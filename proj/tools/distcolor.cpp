// Command-line front end: generate / partition / color / recolor / sweep.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "distcolor/distcolor.hpp"

namespace {

using namespace distcolor;

struct CliOptions {
  std::string graph;
  std::vector<std::string> graphs;  // sweep allows several
  std::string parts = "block:1";
  std::string ordering = "nat";
  std::string selection = "ff";
  std::string mode = "sync";
  std::string perm = "nd";
  std::string flavor = "sync";
  std::string backend = "deterministic";
  std::string preset;
  std::string seed = "1";
  std::uint32_t superstep = 500;
  std::uint32_t iterations = 0;
  bool no_piggyback = false;
  std::string out;
  std::string out_metrics;
  std::string out_json;
  std::string out_coloring;
  std::string out_trajectory;
  std::vector<std::string> presets;   // sweep
  std::string seed_list;              // sweep
  std::uint32_t seed_count = 1;       // sweep
  bool normalize_summary_wanted = false;
};

std::uint64_t parse_seed(const std::string& s) {
  if (s == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return std::strtoull(s.c_str(), nullptr, 10);
}

std::uint64_t max_rounds_from_env() {
  if (const char* env = std::getenv("DISTCOLOR_MAX_ROUNDS")) {
    const auto v = std::strtoull(env, nullptr, 10);
    if (v >= 1) return v;
  }
  return 1000;
}

RunConfig build_config(const CliOptions& opt, bool recolor_command) {
  RunConfig cfg;
  if (!parse_graph_source(opt.graph, cfg.graph))
    throw ValidationError("bad --graph value: " + opt.graph);
  if (!parse_partition_source(opt.parts, cfg.parts))
    throw ValidationError("bad --parts value: " + opt.parts);
  if (auto k = parse_ordering(opt.ordering)) cfg.ordering = *k;
  else throw ValidationError("bad --ordering value: " + opt.ordering);
  if (auto s = parse_selection(opt.selection)) cfg.selection = *s;
  else throw ValidationError("bad --selection value: " + opt.selection);
  if (opt.mode == "sync") cfg.mode = CommMode::Synchronous;
  else if (opt.mode == "async") cfg.mode = CommMode::Asynchronous;
  else throw ValidationError("bad --mode value: " + opt.mode);
  if (!parse_permutation(opt.perm, cfg.schedule))
    throw ValidationError("bad --perm value: " + opt.perm);
  if (opt.flavor == "sync") cfg.flavor = RecolorFlavor::Sync;
  else if (opt.flavor == "async") cfg.flavor = RecolorFlavor::Async;
  else throw ValidationError("bad --flavor value: " + opt.flavor);
  if (opt.backend == "deterministic") cfg.backend = Backend::Deterministic;
  else if (opt.backend == "threaded") cfg.backend = Backend::Threaded;
  else throw ValidationError("bad --backend value: " + opt.backend);
  if (opt.superstep < 1) throw ValidationError("--superstep must be >= 1");
  cfg.superstep_size = opt.superstep;
  cfg.recolor_iterations = recolor_command && opt.iterations == 0 ? 1 : opt.iterations;
  cfg.schedule.iterations = cfg.recolor_iterations;
  cfg.piggyback = !opt.no_piggyback;
  cfg.seed = parse_seed(opt.seed);
  cfg.max_rounds = max_rounds_from_env();
  if (!opt.preset.empty() && !apply_preset(opt.preset, cfg))
    throw ValidationError("unknown preset: " + opt.preset);
  if (cfg.graph.kind == GraphSource::Kind::Rmat) cfg.graph.rmat.seed = cfg.seed;
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

void emit_outputs(const RunConfig& cfg, const RunOutcome& outcome,
                  const CliOptions& opt) {
  const std::string graph_id = cfg.graph.id();
  const std::string config_id = cfg.config_id();
  if (!opt.out_metrics.empty()) {
    std::ostringstream csv;
    csv << kMetricsCsvHeader << '\n';
    write_metrics_csv_row(csv, graph_id, config_id, std::to_string(cfg.seed),
                          outcome.metrics);
    write_file(opt.out_metrics, csv.str());
  }
  if (!opt.out_json.empty()) {
    nlohmann::json j = metrics_to_json(outcome.metrics);
    j["graph"] = graph_id;
    j["config"] = config_id;
    j["seed"] = cfg.seed;
    j["trajectory"] = outcome.metrics.trajectory;
    write_file(opt.out_json, j.dump(2) + "\n");
  }
  if (!opt.out_coloring.empty()) {
    std::ostringstream dump;
    write_coloring(dump, outcome.coloring);
    write_file(opt.out_coloring, dump.str());
  }
  if (!opt.out_trajectory.empty()) {
    std::ostringstream csv;
    csv << kTrajectoryCsvHeader << '\n';
    for (std::size_t i = 0; i < outcome.metrics.trajectory.size(); ++i)
      csv << graph_id << ',' << config_id << ',' << cfg.seed << ',' << i << ','
          << outcome.metrics.trajectory[i] << '\n';
    write_file(opt.out_trajectory, csv.str());
  }
  std::cout << "graph=" << graph_id << " config=" << config_id
            << " seed=" << cfg.seed << " colors=" << outcome.metrics.num_colors
            << " rounds=" << outcome.metrics.rounds
            << " conflicts=" << outcome.metrics.conflicts
            << " msgs=" << outcome.metrics.messages
            << " nonempty=" << outcome.metrics.nonempty_messages
            << " ticks=" << outcome.metrics.ticks << "\n";
}

int run_color(const CliOptions& opt, bool recolor_command) {
  RunConfig cfg = build_config(opt, recolor_command);
  Graph g = load_graph(cfg.graph);
  Partition part = load_partition(cfg.parts, g);
  auto views = build_rank_views(g, part);
  RunOutcome outcome = execute_run(g, views, cfg);
  // Hard gate: never emit an invalid coloring.
  if (!check_validity(g, outcome.coloring).empty()) {
    std::cerr << "error: produced coloring failed validity check\n";
    return 1;
  }
  emit_outputs(cfg, outcome, opt);
  return 0;
}

int run_generate(const CliOptions& opt) {
  RunConfig cfg;
  if (!parse_graph_source(opt.graph, cfg.graph))
    throw ValidationError("bad --graph value: " + opt.graph);
  cfg.graph.rmat.seed = parse_seed(opt.seed);
  Graph g = load_graph(cfg.graph);
  std::ostringstream out;
  write_edge_list(out, g);
  if (opt.out.empty()) std::cout << out.str();
  else write_file(opt.out, out.str());
  std::cerr << "n=" << g.num_vertices() << " m=" << g.num_edges()
            << " max_degree=" << g.max_degree() << "\n";
  return 0;
}

int run_partition(const CliOptions& opt) {
  RunConfig cfg;
  if (!parse_graph_source(opt.graph, cfg.graph))
    throw ValidationError("bad --graph value: " + opt.graph);
  if (!parse_partition_source(opt.parts, cfg.parts))
    throw ValidationError("bad --parts value: " + opt.parts);
  cfg.graph.rmat.seed = parse_seed(opt.seed);
  Graph g = load_graph(cfg.graph);
  Partition part = load_partition(cfg.parts, g);
  std::ostringstream out;
  write_partition(out, part);
  if (opt.out.empty()) std::cout << out.str();
  else write_file(opt.out, out.str());
  return 0;
}

int run_sweep(const CliOptions& opt) {
  std::vector<std::string> graph_specs = opt.graphs;
  if (!opt.graph.empty()) graph_specs.push_back(opt.graph);
  if (graph_specs.empty()) throw ValidationError("sweep needs at least one --graph");

  std::vector<RunConfig> cells;
  for (const std::string& gspec : graph_specs) {
    CliOptions one = opt;
    one.graph = gspec;
    if (opt.presets.empty()) {
      cells.push_back(build_config(one, false));
    } else {
      for (const std::string& preset : opt.presets) {
        one.preset = preset;
        cells.push_back(build_config(one, false));
      }
    }
  }

  std::vector<std::uint64_t> seeds;
  if (!opt.seed_list.empty()) {
    std::istringstream in(opt.seed_list);
    std::string token;
    while (std::getline(in, token, ',')) seeds.push_back(parse_seed(token));
  } else {
    for (std::uint32_t i = 0; i < opt.seed_count; ++i)
      seeds.push_back(parse_seed(opt.seed) + i);
  }

  auto records = sweep(cells, seeds);

  const std::string prefix = opt.out.empty() ? "sweep" : opt.out;
  {
    std::ostringstream csv;
    write_sweep_csv(csv, records);
    write_file(prefix + ".csv", csv.str());
  }
  write_file(prefix + ".json", sweep_to_json(records).dump(2) + "\n");
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, records);
    write_file(prefix + "_trajectory.csv", csv.str());
  }
  if (opt.normalize_summary_wanted) {
    // Baseline per graph: Natural ordering, FirstFit, one rank.
    std::map<std::string, RunMetrics> baselines;
    for (const std::string& gspec : graph_specs) {
      CliOptions one = opt;
      one.graph = gspec;
      RunConfig base = build_config(one, false);
      base.ordering = OrderingKind::Natural;
      base.selection = SelectionSpec::first_fit();
      base.mode = CommMode::Synchronous;
      base.recolor_iterations = 0;
      base.parts = {PartitionSource::Kind::Block, 1, ""};
      baselines[base.graph.id()] = execute_run(base).metrics;
    }
    write_file(prefix + "_normalized.json",
               normalized_summary(records, baselines).dump(2) + "\n");
  }
  std::uint64_t failures = 0;
  for (const auto& rec : records)
    for (const auto& s : rec.seeds)
      if (!s.ok()) ++failures;
  std::cout << "cells=" << records.size() << " seeds=" << seeds.size()
            << " failures=" << failures << " -> " << prefix << ".csv\n";
  return failures == 0 ? 0 : 1;
}

void add_run_options(CLI::App* cmd, CliOptions& opt, bool with_recolor) {
  cmd->add_option("--graph", opt.graph,
                  "graph source: mtx:PATH | edges:PATH | rmat:scale,ef,a,b,c,d")
      ->required();
  cmd->add_option("--parts", opt.parts, "partition source: block:P | file:PATH");
  cmd->add_option("--ordering", opt.ordering, "nat | lf | sl | if | bf");
  cmd->add_option("--selection", opt.selection, "ff | sff[:est] | lu | randx:X");
  cmd->add_option("--mode", opt.mode, "sync | async");
  cmd->add_option("--superstep", opt.superstep, "owned vertices per superstep");
  cmd->add_option("--seed", opt.seed, "integer seed, or 'random'");
  cmd->add_option("--preset", opt.preset, "speed | quality");
  cmd->add_option("--backend", opt.backend, "deterministic | threaded");
  cmd->add_option("--out-metrics", opt.out_metrics, "metrics CSV path");
  cmd->add_option("--out-json", opt.out_json, "metrics JSON path");
  cmd->add_option("--out-coloring", opt.out_coloring, "coloring dump path");
  cmd->add_option("--out-trajectory", opt.out_trajectory, "trajectory CSV path");
  if (with_recolor) {
    cmd->add_option("--iterations", opt.iterations, "recoloring iterations");
    cmd->add_option("--perm", opt.perm,
                    "rv | ni | nd | rand | nd-rand:x | nd-rand-pow2");
    cmd->add_option("--flavor", opt.flavor, "sync | async recoloring");
    cmd->add_flag("--no-piggyback", opt.no_piggyback,
                  "per-step messages instead of the piggyback plan");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed graph coloring simulator"};
  app.require_subcommand(1);

  CliOptions gen_opt, part_opt, color_opt, recolor_opt, sweep_opt;

  auto* generate = app.add_subcommand("generate", "emit a graph as an edge list");
  generate->add_option("--graph", gen_opt.graph, "graph source")->required();
  generate->add_option("--seed", gen_opt.seed, "rmat seed");
  generate->add_option("--out", gen_opt.out, "output path (stdout if omitted)");

  auto* partition = app.add_subcommand("partition", "emit a vertex->rank owner file");
  partition->add_option("--graph", part_opt.graph, "graph source")->required();
  partition->add_option("--parts", part_opt.parts, "block:P | file:PATH")->required();
  partition->add_option("--seed", part_opt.seed, "rmat seed");
  partition->add_option("--out", part_opt.out, "output path (stdout if omitted)");

  auto* color = app.add_subcommand("color", "distributed speculative coloring");
  add_run_options(color, color_opt, /*with_recolor=*/true);

  auto* recolor = app.add_subcommand("recolor", "coloring plus recoloring iterations");
  add_run_options(recolor, recolor_opt, /*with_recolor=*/true);
  recolor_opt.iterations = 0;  // 0 means "default to 1" for this subcommand

  auto* sweep_cmd = app.add_subcommand("sweep", "run a config grid and emit tables");
  sweep_cmd->add_option("--graph", sweep_opt.graphs, "graph source (repeatable)");
  sweep_cmd->add_option("--parts", sweep_opt.parts, "block:P | file:PATH");
  sweep_cmd->add_option("--ordering", sweep_opt.ordering, "ordering for explicit cells");
  sweep_cmd->add_option("--selection", sweep_opt.selection, "selection for explicit cells");
  sweep_cmd->add_option("--mode", sweep_opt.mode, "sync | async");
  sweep_cmd->add_option("--superstep", sweep_opt.superstep, "superstep size");
  sweep_cmd->add_option("--iterations", sweep_opt.iterations, "recoloring iterations");
  sweep_cmd->add_option("--perm", sweep_opt.perm, "class permutation");
  sweep_cmd->add_option("--flavor", sweep_opt.flavor, "sync | async recoloring");
  sweep_cmd->add_flag("--no-piggyback", sweep_opt.no_piggyback, "disable piggybacking");
  sweep_cmd->add_option("--preset", sweep_opt.presets, "speed | quality (repeatable)");
  sweep_cmd->add_option("--seed", sweep_opt.seed, "first seed");
  sweep_cmd->add_option("--seeds", sweep_opt.seed_count, "number of consecutive seeds");
  sweep_cmd->add_option("--seed-list", sweep_opt.seed_list, "comma-separated seeds");
  sweep_cmd->add_option("--backend", sweep_opt.backend, "deterministic | threaded");
  sweep_cmd->add_option("--out", sweep_opt.out, "output prefix (default: sweep)");
  sweep_cmd->add_flag("--normalize", sweep_opt.normalize_summary_wanted,
                      "also emit a normalized summary JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(gen_opt);
    if (partition->parsed()) return run_partition(part_opt);
    if (color->parsed()) return run_color(color_opt, false);
    if (recolor->parsed()) return run_color(recolor_opt, true);
    if (sweep_cmd->parsed()) return run_sweep(sweep_opt);
  } catch (const distcolor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
