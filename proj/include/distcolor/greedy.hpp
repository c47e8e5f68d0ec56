#pragma once

#include <span>
#include <vector>

#include "distcolor/coloring.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/selection.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

namespace detail {

/// Stamped forbidden-color table: mark() is O(1), no clearing between
/// vertices. Grows on demand since RandomX and staggered starts can probe
/// past max_degree+1.
class ForbiddenStamps {
 public:
  void begin_vertex() { ++stamp_; }
  void mark(Color c) {
    if (c >= mark_.size()) mark_.resize(c + 1, 0);
    mark_[c] = stamp_;
  }
  bool operator()(Color c) const {
    return c < mark_.size() && mark_[c] == stamp_;
  }

 private:
  std::vector<std::uint64_t> mark_;
  std::uint64_t stamp_ = 0;
};

}  // namespace detail

/// Sequential greedy coloring: visit `order`, give each vertex a color
/// permitted by its already-colored neighbors, chosen per `spec`. With
/// FirstFit the result uses at most max_degree+1 colors. Deterministic for
/// fixed (graph, order, spec, seed).
inline Coloring greedy_color(const Graph& g, std::span<const VertexId> order,
                             const SelectionSpec& spec, std::uint64_t seed) {
  const VertexId n = g.num_vertices();
  if (order.size() != n) throw ValidationError("greedy_color: order is not a permutation");
  std::vector<std::uint8_t> seen(n, 0);
  for (VertexId v : order) {
    if (v >= n || seen[v]) throw ValidationError("greedy_color: order is not a permutation");
    seen[v] = 1;
  }

  Coloring coloring(n);
  ColorChooser chooser(spec, /*rank=*/0, /*num_ranks=*/1,
                       /*estimate_hint=*/g.max_degree() + 1, seed);
  detail::ForbiddenStamps forbidden;
  for (VertexId v : order) {
    forbidden.begin_vertex();
    for (VertexId w : g.adj(v))
      if (coloring[w] != kUncolored) forbidden.mark(coloring[w]);
    const Color c = chooser.pick(forbidden, v, /*attempt=*/0);
    coloring[v] = c;
    chooser.note_assigned(c);
  }
  return coloring;
}

/// Exact chromatic number by exhaustive search, k ascending. Vertex i only
/// tries colors up to one past the prefix maximum, which prunes color
/// permutations without losing exactness. Refuses graphs above `cap`.
inline Color chromatic_oracle(const Graph& g, VertexId cap = 12) {
  const VertexId n = g.num_vertices();
  if (n > cap) throw ValidationError("chromatic_oracle: graph exceeds size cap");
  if (n == 0) return 0;
  if (g.num_edges() == 0) return 1;

  std::vector<Color> assign(n, kUncolored);
  auto feasible = [&](Color k, auto&& self, VertexId v) -> bool {
    if (v == n) return true;
    Color prefix_max = 0;
    for (VertexId u = 0; u < v; ++u) prefix_max = std::max(prefix_max, assign[u]);
    const Color limit = std::min<Color>(k, prefix_max + 1);
    for (Color c = 1; c <= limit; ++c) {
      bool ok = true;
      for (VertexId w : g.adj(v))
        if (w < v && assign[w] == c) { ok = false; break; }
      if (!ok) continue;
      assign[v] = c;
      if (self(k, self, v + 1)) return true;
      assign[v] = kUncolored;
    }
    return false;
  };
  for (Color k = 2;; ++k)
    if (feasible(k, feasible, 0)) return k;
}

}  // namespace distcolor
