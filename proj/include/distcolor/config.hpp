#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "distcolor/ordering.hpp"
#include "distcolor/protocol.hpp"
#include "distcolor/recolor.hpp"
#include "distcolor/rmat.hpp"
#include "distcolor/selection.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

struct GraphSource {
  enum class Kind { MatrixMarket, EdgeList, Rmat };
  Kind kind = Kind::EdgeList;
  std::string path;
  RmatParams rmat;

  std::string id() const {
    switch (kind) {
      case Kind::MatrixMarket: return "mtx:" + path;
      case Kind::EdgeList: return "edges:" + path;
      case Kind::Rmat: {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "rmat:%u,%u,%g,%g,%g,%g,s%llu",
                      rmat.scale, rmat.edge_factor, rmat.a, rmat.b, rmat.c,
                      rmat.d, static_cast<unsigned long long>(rmat.seed));
        return buf;
      }
    }
    return "?";
  }
};

struct PartitionSource {
  enum class Kind { Block, File };
  Kind kind = Kind::Block;
  RankId num_ranks = 1;
  std::string path;

  std::string id() const {
    return kind == Kind::Block ? "block:" + std::to_string(num_ranks)
                               : "file:" + path;
  }
};

enum class RecolorFlavor { Sync, Async };

/// Everything one run needs; the CLI and the sweep harness both populate
/// this. Seeds default to a fixed constant so unadorned runs reproduce.
struct RunConfig {
  GraphSource graph;
  PartitionSource parts;
  OrderingKind ordering = OrderingKind::Natural;
  SelectionSpec selection;
  CommMode mode = CommMode::Synchronous;
  std::uint32_t superstep_size = 500;
  std::uint32_t recolor_iterations = 0;
  PermutationSchedule schedule;  // iterations field mirrors recolor_iterations
  bool piggyback = true;
  RecolorFlavor flavor = RecolorFlavor::Sync;
  std::uint64_t seed = 1;
  Backend backend = Backend::Deterministic;
  std::uint64_t max_rounds = 1000;

  /// Compact tag ordered like the paper's naming: selection, ordering,
  /// mode, superstep, then the recoloring suffix.
  std::string config_id() const {
    std::string id = to_string(selection);
    id += "-";
    id += to_string(ordering);
    id += "-";
    id += to_string(mode);
    id += "-s" + std::to_string(superstep_size);
    if (recolor_iterations > 0) {
      id += flavor == RecolorFlavor::Sync ? "-rc-" : "-arc-";
      id += permutation_tag();
      id += "-i" + std::to_string(recolor_iterations);
      if (!piggyback) id += "-nopb";
    }
    return id;
  }

  std::string permutation_tag() const {
    std::string tag = to_string(schedule.base);
    if (schedule.injection == InjectionRule::EveryX)
      tag += "-rand" + std::to_string(schedule.every_x);
    else if (schedule.injection == InjectionRule::PowersOfTwo)
      tag += "-randpow2";
    return tag;
  }
};

// ---- string forms used by the CLI and config files ----------------------

inline std::optional<OrderingKind> parse_ordering(const std::string& s) {
  if (s == "nat" || s == "natural") return OrderingKind::Natural;
  if (s == "lf") return OrderingKind::LargestFirst;
  if (s == "sl") return OrderingKind::SmallestLast;
  if (s == "if") return OrderingKind::InternalFirst;
  if (s == "bf") return OrderingKind::BoundaryFirst;
  return std::nullopt;
}

/// "ff" | "sff" | "sff:<estimate>" | "lu" | "randx:<X>"
inline std::optional<SelectionSpec> parse_selection(const std::string& s) {
  if (s == "ff") return SelectionSpec::first_fit();
  if (s == "lu") return SelectionSpec::least_used();
  if (s == "sff") return SelectionSpec::staggered(0);
  if (s.rfind("sff:", 0) == 0) {
    const long v = std::atol(s.c_str() + 4);
    if (v < 1) return std::nullopt;
    return SelectionSpec::staggered(static_cast<Color>(v));
  }
  if (s.rfind("randx:", 0) == 0) {
    const long v = std::atol(s.c_str() + 6);
    if (v < 1) return std::nullopt;
    return SelectionSpec::random_x(static_cast<std::uint32_t>(v));
  }
  return std::nullopt;
}

/// "rv" | "ni" | "nd" | "rand" | "nd-rand:<x>" | "nd-rand-pow2"
inline bool parse_permutation(const std::string& s, PermutationSchedule& out) {
  out.injection = InjectionRule::None;
  if (s == "rv") { out.base = PermutationKind::Reverse; return true; }
  if (s == "ni") { out.base = PermutationKind::NonIncreasing; return true; }
  if (s == "nd") { out.base = PermutationKind::NonDecreasing; return true; }
  if (s == "rand") { out.base = PermutationKind::Random; return true; }
  if (s == "nd-rand-pow2") {
    out.base = PermutationKind::NonDecreasing;
    out.injection = InjectionRule::PowersOfTwo;
    return true;
  }
  if (s.rfind("nd-rand:", 0) == 0) {
    const long x = std::atol(s.c_str() + 8);
    if (x < 1) return false;
    out.base = PermutationKind::NonDecreasing;
    out.injection = InjectionRule::EveryX;
    out.every_x = static_cast<std::uint32_t>(x);
    return true;
  }
  return false;
}

/// "mtx:<path>" | "edges:<path>" | "rmat:scale,edgefactor,a,b,c,d"
inline bool parse_graph_source(const std::string& s, GraphSource& out) {
  if (s.rfind("mtx:", 0) == 0) {
    out.kind = GraphSource::Kind::MatrixMarket;
    out.path = s.substr(4);
    return !out.path.empty();
  }
  if (s.rfind("edges:", 0) == 0) {
    out.kind = GraphSource::Kind::EdgeList;
    out.path = s.substr(6);
    return !out.path.empty();
  }
  if (s.rfind("rmat:", 0) == 0) {
    out.kind = GraphSource::Kind::Rmat;
    double f[6];
    if (std::sscanf(s.c_str() + 5, "%lf,%lf,%lf,%lf,%lf,%lf", &f[0], &f[1],
                    &f[2], &f[3], &f[4], &f[5]) != 6)
      return false;
    if (f[0] < 1 || f[1] < 1) return false;
    out.rmat.scale = static_cast<std::uint32_t>(f[0]);
    out.rmat.edge_factor = static_cast<std::uint32_t>(f[1]);
    out.rmat.a = f[2];
    out.rmat.b = f[3];
    out.rmat.c = f[4];
    out.rmat.d = f[5];
    return true;
  }
  return false;
}

/// "block:<p>" | "file:<path>"
inline bool parse_partition_source(const std::string& s, PartitionSource& out) {
  if (s.rfind("block:", 0) == 0) {
    const long p = std::atol(s.c_str() + 6);
    if (p < 1) return false;
    out.kind = PartitionSource::Kind::Block;
    out.num_ranks = static_cast<RankId>(p);
    return true;
  }
  if (s.rfind("file:", 0) == 0) {
    out.kind = PartitionSource::Kind::File;
    out.path = s.substr(5);
    return !out.path.empty();
  }
  return false;
}

/// The paper's two recommended parameter sets. "speed": FirstFit,
/// Internal-First, synchronous, no recoloring. "quality": Random-5 Fit,
/// Internal-First, synchronous, one Non-Decreasing recoloring iteration.
inline bool apply_preset(const std::string& name, RunConfig& cfg) {
  if (name == "speed") {
    cfg.selection = SelectionSpec::first_fit();
    cfg.ordering = OrderingKind::InternalFirst;
    cfg.mode = CommMode::Synchronous;
    cfg.recolor_iterations = 0;
    return true;
  }
  if (name == "quality") {
    cfg.selection = SelectionSpec::random_x(5);
    cfg.ordering = OrderingKind::InternalFirst;
    cfg.mode = CommMode::Synchronous;
    cfg.recolor_iterations = 1;
    cfg.schedule.base = PermutationKind::NonDecreasing;
    cfg.schedule.injection = InjectionRule::None;
    cfg.flavor = RecolorFlavor::Sync;
    return true;
  }
  return false;
}

}  // namespace distcolor
