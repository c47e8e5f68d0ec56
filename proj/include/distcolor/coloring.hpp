#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "distcolor/graph.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

/// Vertex -> color assignment, possibly partial (kUncolored = 0 entries).
struct Coloring {
  std::vector<Color> values;

  Coloring() = default;
  explicit Coloring(VertexId n) : values(n, kUncolored) {}

  Color operator[](VertexId v) const { return values[v]; }
  Color& operator[](VertexId v) { return values[v]; }

  bool complete() const {
    return std::find(values.begin(), values.end(), kUncolored) == values.end();
  }

  /// Largest assigned color (0 when nothing is colored).
  Color num_colors() const {
    Color m = 0;
    for (Color c : values) m = std::max(m, c);
    return m;
  }

  /// Global vertex count per color 1..num_colors().
  std::vector<std::uint64_t> class_sizes() const {
    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(num_colors()) + 1, 0);
    for (Color c : values)
      if (c != kUncolored) ++sizes[c];
    return sizes;
  }

  friend bool operator==(const Coloring& a, const Coloring& b) = default;
};

/// All edges whose endpoints share a color. Empty result == valid coloring.
/// The coloring must be complete.
inline std::vector<std::pair<VertexId, VertexId>> check_validity(
    const Graph& g, const Coloring& c) {
  if (c.values.size() != g.num_vertices())
    throw ValidationError("check_validity: coloring size mismatch");
  if (!c.complete())
    throw ValidationError("check_validity: coloring is incomplete");
  std::vector<std::pair<VertexId, VertexId>> conflicts;
  g.for_each_edge([&](VertexId u, VertexId v) {
    if (c[u] == c[v]) conflicts.emplace_back(u, v);
  });
  return conflicts;
}

}  // namespace distcolor
