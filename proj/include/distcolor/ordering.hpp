#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "distcolor/graph.hpp"
#include "distcolor/partition.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

enum class OrderingKind {
  Natural,        // storage order
  LargestFirst,   // non-increasing degree
  SmallestLast,   // reverse of iterated min-degree removal
  InternalFirst,  // stable partition of Natural: internal, then boundary
  BoundaryFirst,  // stable partition of Natural: boundary, then internal
};

inline const char* to_string(OrderingKind k) {
  switch (k) {
    case OrderingKind::Natural: return "nat";
    case OrderingKind::LargestFirst: return "lf";
    case OrderingKind::SmallestLast: return "sl";
    case OrderingKind::InternalFirst: return "if";
    case OrderingKind::BoundaryFirst: return "bf";
  }
  return "?";
}

/// Whole-graph ordering scope: every vertex visible, none boundary.
struct GraphScope {
  const Graph* g;

  std::size_t size() const { return g->num_vertices(); }
  VertexId vertex(std::uint32_t i) const { return static_cast<VertexId>(i); }
  std::uint32_t degree(std::uint32_t i) const { return g->degree(static_cast<VertexId>(i)); }
  bool boundary(std::uint32_t) const { return false; }
  template <class F>
  void for_each_scope_neighbor(std::uint32_t i, F&& f) const {
    for (VertexId w : g->adj(static_cast<VertexId>(i))) f(static_cast<std::uint32_t>(w));
  }
};

/// One rank's ordering scope: its owned vertices, degrees taken over the
/// locally known subgraph (owned plus ghost edges). Ghost vertices are not
/// part of the scope, so removal-based orderings never shed their edges.
struct RankScope {
  const RankView* view;

  std::size_t size() const { return view->owned_count(); }
  VertexId vertex(std::uint32_t i) const { return view->owned[i]; }
  std::uint32_t degree(std::uint32_t i) const { return view->local_degree(i); }
  bool boundary(std::uint32_t i) const { return view->is_boundary[i] != 0; }
  template <class F>
  void for_each_scope_neighbor(std::uint32_t i, F&& f) const {
    for (std::uint32_t j : view->owned_neighbors(i)) f(j);
  }
};

namespace detail {

// Smallest Last via FIFO degree buckets: buckets are seeded in ascending
// vertex order and a vertex is re-queued at the back of its new bucket each
// time its degree drops, so entries within a bucket are ordered by the time
// the vertex reached that degree. Stale entries are skipped lazily, which
// keeps the whole procedure O(|E|).
template <class Scope>
std::vector<std::uint32_t> smallest_last_removal(const Scope& scope) {
  const std::size_t k = scope.size();
  std::uint32_t max_deg = 0;
  std::vector<std::uint32_t> deg(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    deg[i] = scope.degree(i);
    max_deg = std::max(max_deg, deg[i]);
  }
  std::vector<std::deque<std::uint32_t>> bucket(max_deg + 1);
  for (std::uint32_t i = 0; i < k; ++i) bucket[deg[i]].push_back(i);

  std::vector<std::uint32_t> removal;
  removal.reserve(k);
  std::vector<std::uint8_t> removed(k, 0);
  std::uint32_t cursor = 0;
  while (removal.size() < k) {
    while (cursor <= max_deg && bucket[cursor].empty()) ++cursor;
    std::uint32_t i = bucket[cursor].front();
    bucket[cursor].pop_front();
    if (removed[i] || deg[i] != cursor) continue;  // stale entry
    removed[i] = 1;
    removal.push_back(i);
    scope.for_each_scope_neighbor(i, [&](std::uint32_t j) {
      if (removed[j]) return;
      --deg[j];
      bucket[deg[j]].push_back(j);
      cursor = std::min(cursor, deg[j]);
    });
  }
  return removal;
}

}  // namespace detail

/// Permutation of the scope's vertices under the requested discipline.
/// All tie-breaks are deterministic; see each branch.
template <class Scope>
std::vector<VertexId> order_vertices(const Scope& scope, OrderingKind kind) {
  const std::size_t k = scope.size();
  std::vector<VertexId> out;
  out.reserve(k);
  switch (kind) {
    case OrderingKind::Natural:
      for (std::uint32_t i = 0; i < k; ++i) out.push_back(scope.vertex(i));
      return out;

    case OrderingKind::LargestFirst: {
      // Counting sort by degree, non-increasing; ties keep ascending id.
      std::uint32_t max_deg = 0;
      for (std::uint32_t i = 0; i < k; ++i) max_deg = std::max(max_deg, scope.degree(i));
      std::vector<std::vector<std::uint32_t>> bucket(max_deg + 1);
      for (std::uint32_t i = 0; i < k; ++i) bucket[scope.degree(i)].push_back(i);
      for (std::uint32_t d = max_deg + 1; d-- > 0;)
        for (std::uint32_t i : bucket[d]) out.push_back(scope.vertex(i));
      return out;
    }

    case OrderingKind::SmallestLast: {
      auto removal = detail::smallest_last_removal(scope);
      for (auto it = removal.rbegin(); it != removal.rend(); ++it)
        out.push_back(scope.vertex(*it));
      return out;
    }

    case OrderingKind::InternalFirst:
    case OrderingKind::BoundaryFirst: {
      const bool boundary_first = (kind == OrderingKind::BoundaryFirst);
      for (std::uint32_t i = 0; i < k; ++i)
        if (scope.boundary(i) == boundary_first) out.push_back(scope.vertex(i));
      for (std::uint32_t i = 0; i < k; ++i)
        if (scope.boundary(i) != boundary_first) out.push_back(scope.vertex(i));
      return out;
    }
  }
  throw ValidationError("order_vertices: unknown ordering kind");
}

}  // namespace distcolor
