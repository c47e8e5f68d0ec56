#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "distcolor/graph.hpp"
#include "distcolor/rng.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

/// Recursive-matrix generator parameters. The adjacency matrix is split in
/// four quadrants and each sampled edge descends `scale` levels, picking a
/// quadrant with probabilities (a, b, c, d) at every level. No per-level
/// probability noise is applied.
struct RmatParams {
  std::uint32_t scale = 10;       // n = 2^scale
  std::uint32_t edge_factor = 8;  // directed samples per vertex
  double a = 0.25, b = 0.25, c = 0.25, d = 0.25;
  std::uint64_t seed = 1;

  void validate() const {
    if (scale < 1) throw ValidationError("rmat: scale must be >= 1");
    if (edge_factor < 1) throw ValidationError("rmat: edge factor must be >= 1");
    if (a < 0 || b < 0 || c < 0 || d < 0)
      throw ValidationError("rmat: negative quadrant probability");
    if (std::abs(a + b + c + d - 1.0) > 1e-9)
      throw ValidationError("rmat: probabilities must sum to 1");
  }
};

/// Generates an undirected simple RMAT graph. Deterministic for fixed
/// params: two calls with the same seed return bitwise-identical graphs.
/// Duplicate samples are dropped, not resampled, so m <= edge_factor * n.
/// Generation refuses instances whose sample-buffer-plus-CSR estimate
/// exceeds `memory_cap_bytes`.
inline Graph generate_rmat(const RmatParams& params,
                           std::uint64_t memory_cap_bytes = 8ULL << 30) {
  params.validate();
  const std::uint64_t n = 1ULL << params.scale;
  const std::uint64_t samples = params.edge_factor * n;
  const std::uint64_t estimate = samples * 16 + 4 * n * 8;
  if (estimate > memory_cap_bytes)
    throw ValidationError("rmat: size exceeds configured memory cap");

  SplitRng root(params.seed);
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(samples);
  const double ab = params.a + params.b;
  const double abc = ab + params.c;
  for (std::uint64_t s = 0; s < samples; ++s) {
    SplitRng rng = root.stream(s);
    std::uint64_t row = 0, col = 0;
    for (std::uint32_t level = 0; level < params.scale; ++level) {
      const double u = rng.unit();
      row <<= 1;
      col <<= 1;
      if (u < params.a) {
        // top-left: both bits stay 0
      } else if (u < ab) {
        col |= 1;
      } else if (u < abc) {
        row |= 1;
      } else {
        row |= 1;
        col |= 1;
      }
    }
    edges.emplace_back(static_cast<VertexId>(row), static_cast<VertexId>(col));
  }
  return Graph::from_edges(static_cast<VertexId>(n), edges);
}

}  // namespace distcolor
