#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here are deliberately naive re-implementations kept separate from the
// library code they check.

#include <set>
#include <utility>
#include <vector>

#include "distcolor/coloring.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/rng.hpp"

namespace testsupport {

using distcolor::Color;
using distcolor::Coloring;
using distcolor::Graph;
using distcolor::VertexId;

inline Graph from_pairs(VertexId n,
                        std::vector<std::pair<VertexId, VertexId>> edges) {
  return Graph::from_edges(n, edges);
}

inline Graph path3() { return from_pairs(3, {{0, 1}, {1, 2}}); }
inline Graph path4() { return from_pairs(4, {{0, 1}, {1, 2}, {2, 3}}); }
inline Graph triangle() { return from_pairs(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Graph k23() {
  return from_pairs(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
}

inline Graph k22() { return from_pairs(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}); }

inline Graph star5() {  // K_{1,4}, center 0
  return from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

inline Graph petersen() {
  return from_pairs(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},
                         {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
                         {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}});
}

/// Erdos-Renyi-style G(n, m) with distinct seeded edges (no self-loops).
inline Graph random_graph(VertexId n, std::uint64_t m, std::uint64_t seed) {
  distcolor::SplitRng rng(seed);
  std::set<std::pair<VertexId, VertexId>> picked;
  std::vector<std::pair<VertexId, VertexId>> edges;
  const std::uint64_t max_edges = std::uint64_t(n) * (n - 1) / 2;
  m = std::min(m, max_edges);
  while (picked.size() < m) {
    auto u = static_cast<VertexId>(rng.below(n));
    auto v = static_cast<VertexId>(rng.below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (picked.insert({u, v}).second) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

/// Independent re-implementation of plain first-fit greedy coloring over a
/// visit order; used to cross-check the library's engine.
inline Coloring reference_first_fit(const Graph& g,
                                    const std::vector<VertexId>& order) {
  Coloring c(g.num_vertices());
  for (VertexId v : order) {
    std::set<Color> forbidden;
    for (VertexId w : g.adj(v))
      if (c[w] != distcolor::kUncolored) forbidden.insert(c[w]);
    Color pick = 1;
    while (forbidden.contains(pick)) ++pick;
    c[v] = pick;
  }
  return c;
}

/// Brute-force validity count (independent of check_validity).
inline std::uint64_t count_monochrome_edges(const Graph& g, const Coloring& c) {
  std::uint64_t bad = 0;
  for (VertexId u = 0; u < g.num_vertices(); ++u)
    for (VertexId v : g.adj(u))
      if (u < v && c[u] == c[v]) ++bad;
  return bad;
}

}  // namespace testsupport
