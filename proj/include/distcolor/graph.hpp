#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "distcolor/types.hpp"

namespace distcolor {

/// Undirected simple graph in CSR form. Adjacency lists are strictly sorted,
/// carry no self-loops and no duplicates, and are symmetric: u in adj(v) iff
/// v in adj(u). Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds from a directed edge sample: pairs are symmetrized, self-loops
  /// dropped and duplicates merged. Every loader and generator funnels
  /// through here so the invariants hold on all construction paths.
  static Graph from_edges(VertexId n,
                          std::span<const std::pair<VertexId, VertexId>> edges) {
    Graph g;
    g.n_ = n;
    std::vector<std::uint64_t> count(static_cast<std::size_t>(n) + 1, 0);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n)
        throw ValidationError("edge endpoint out of range");
      if (u == v) continue;
      ++count[u + 1];
      ++count[v + 1];
    }
    for (std::size_t i = 1; i <= n; ++i) count[i] += count[i - 1];
    g.offsets_ = count;
    g.adj_.resize(count[n]);
    std::vector<std::uint64_t> cursor(count.begin(), count.end() - 1);
    for (auto [u, v] : edges) {
      if (u == v) continue;
      g.adj_[cursor[u]++] = v;
      g.adj_[cursor[v]++] = u;
    }
    // Sort and deduplicate each list, then compact the CSR arrays.
    std::uint64_t write = 0;
    std::uint64_t read_begin = 0;
    for (VertexId v = 0; v < n; ++v) {
      const std::uint64_t read_end = g.offsets_[v + 1];
      auto first = g.adj_.begin() + static_cast<std::ptrdiff_t>(read_begin);
      auto last = g.adj_.begin() + static_cast<std::ptrdiff_t>(read_end);
      std::sort(first, last);
      auto unique_end = std::unique(first, last);
      const std::uint64_t start = write;
      for (auto it = first; it != unique_end; ++it) g.adj_[write++] = *it;
      read_begin = read_end;
      g.offsets_[v] = start;
    }
    g.offsets_[n] = write;
    g.adj_.resize(write);
    g.adj_.shrink_to_fit();
    g.m_ = write / 2;
    g.max_degree_ = 0;
    for (VertexId v = 0; v < n; ++v)
      g.max_degree_ = std::max<VertexId>(g.max_degree_, g.degree(v));
    g.validate();
    return g;
  }

  VertexId num_vertices() const { return n_; }
  std::uint64_t num_edges() const { return m_; }
  VertexId max_degree() const { return max_degree_; }

  VertexId degree(VertexId v) const {
    return static_cast<VertexId>(offsets_[v + 1] - offsets_[v]);
  }

  std::span<const VertexId> adj(VertexId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  bool has_edge(VertexId u, VertexId v) const {
    auto a = adj(u);
    return std::binary_search(a.begin(), a.end(), v);
  }

  /// Calls f(u, v) once per undirected edge, with u < v.
  template <class F>
  void for_each_edge(F&& f) const {
    for (VertexId u = 0; u < n_; ++u)
      for (VertexId v : adj(u))
        if (u < v) f(u, v);
  }

  /// Re-checks all structural invariants. Cheap relative to construction.
  void validate() const {
    if (offsets_.size() != static_cast<std::size_t>(n_) + 1)
      throw ValidationError("graph: offset table size mismatch");
    std::uint64_t total = 0;
    for (VertexId v = 0; v < n_; ++v) {
      auto a = adj(v);
      total += a.size();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == v) throw ValidationError("graph: self-loop");
        if (a[i] >= n_) throw ValidationError("graph: neighbor out of range");
        if (i > 0 && a[i] <= a[i - 1])
          throw ValidationError("graph: adjacency not strictly sorted");
        if (!has_edge(a[i], v))
          throw ValidationError("graph: asymmetric edge");
      }
    }
    if (total != 2 * m_) throw ValidationError("graph: edge count mismatch");
  }

 private:
  VertexId n_ = 0;
  std::uint64_t m_ = 0;
  VertexId max_degree_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::vector<VertexId> adj_;
};

}  // namespace distcolor
