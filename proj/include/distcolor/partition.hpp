#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "distcolor/graph.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

/// Vertex ownership map: every vertex belongs to exactly one rank.
struct Partition {
  std::vector<RankId> owner;
  RankId num_ranks = 0;

  RankId operator[](VertexId v) const { return owner[v]; }
};

/// Contiguous ranges of size ceil(n/p) or floor(n/p); rank r owns range r.
inline Partition block_partition(const Graph& g, RankId p) {
  const VertexId n = g.num_vertices();
  if (p < 1 || p > n) throw ValidationError("block_partition: rank count out of range");
  Partition part;
  part.num_ranks = p;
  part.owner.resize(n);
  const VertexId base = n / p;
  const VertexId extra = n % p;  // first `extra` ranks get one more vertex
  VertexId v = 0;
  for (RankId r = 0; r < p; ++r) {
    const VertexId size = base + (r < extra ? 1 : 0);
    for (VertexId i = 0; i < size; ++i) part.owner[v++] = r;
  }
  return part;
}

/// Reads an owner file: line i holds the rank of vertex i.
inline Partition load_partition_file(std::istream& in, const Graph& g, RankId p) {
  Partition part;
  part.num_ranks = p;
  part.owner.reserve(g.num_vertices());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream entry(line);
    std::int64_t r = -1;
    if (!(entry >> r)) throw ParseError("partition: malformed line");
    if (r < 0 || r >= static_cast<std::int64_t>(p))
      throw ParseError("partition: owner out of range [0," + std::to_string(p) + ")");
    part.owner.push_back(static_cast<RankId>(r));
  }
  if (part.owner.size() != g.num_vertices())
    throw ParseError("partition: line count does not match vertex count");
  return part;
}

inline void write_partition(std::ostream& out, const Partition& part) {
  for (RankId r : part.owner) out << r << '\n';
}

/// One rank's immutable picture of the distributed graph: its owned
/// vertices, their adjacency split into owned and ghost neighbors, and the
/// channel structure toward neighbor ranks. A vertex is boundary iff it has
/// at least one ghost neighbor. Mutable color state lives elsewhere; views
/// are shared read-only between rank workers.
struct RankView {
  RankId rank = 0;
  std::vector<VertexId> owned;  // global ids, ascending

  // CSR over owned index: neighbors owned by this rank, as local indices.
  std::vector<std::uint32_t> own_offsets;
  std::vector<std::uint32_t> own_adj;

  // CSR over owned index: neighbors owned elsewhere, as ghost indices.
  std::vector<std::uint32_t> ghost_offsets;
  std::vector<std::uint32_t> ghost_adj;

  std::vector<VertexId> ghosts;      // global ids, ascending
  std::vector<RankId> ghost_owner;   // by ghost index
  std::vector<std::uint8_t> is_boundary;  // by owned index

  // CSR over owned index: distinct neighbor ranks per boundary vertex.
  std::vector<std::uint32_t> peer_offsets;
  std::vector<RankId> peer_ranks;

  std::vector<RankId> neighbor_ranks;  // ranks sharing >=1 cross edge, ascending
  std::unordered_map<VertexId, std::uint32_t> ghost_index;  // global -> ghost idx

  std::size_t owned_count() const { return owned.size(); }

  std::uint32_t local_degree(std::uint32_t i) const {
    return (own_offsets[i + 1] - own_offsets[i]) +
           (ghost_offsets[i + 1] - ghost_offsets[i]);
  }

  std::span<const std::uint32_t> owned_neighbors(std::uint32_t i) const {
    return {own_adj.data() + own_offsets[i], own_adj.data() + own_offsets[i + 1]};
  }
  std::span<const std::uint32_t> ghost_neighbors(std::uint32_t i) const {
    return {ghost_adj.data() + ghost_offsets[i], ghost_adj.data() + ghost_offsets[i + 1]};
  }
  std::span<const RankId> peers(std::uint32_t i) const {
    return {peer_ranks.data() + peer_offsets[i], peer_ranks.data() + peer_offsets[i + 1]};
  }
};

/// Splits the graph into one RankView per rank. Cross edges appear in
/// exactly the two views of their endpoint owners; intra edges in one.
inline std::vector<RankView> build_rank_views(const Graph& g, const Partition& part) {
  const VertexId n = g.num_vertices();
  if (part.owner.size() != n)
    throw ValidationError("build_rank_views: partition size mismatch");
  const RankId p = part.num_ranks;

  // Local index of every vertex within its owner's view.
  std::vector<std::uint32_t> local_of(n);
  std::vector<RankView> views(p);
  for (RankId r = 0; r < p; ++r) views[r].rank = r;
  for (VertexId v = 0; v < n; ++v) {
    RankId r = part.owner[v];
    if (r >= p) throw ValidationError("build_rank_views: owner out of range");
    local_of[v] = static_cast<std::uint32_t>(views[r].owned.size());
    views[r].owned.push_back(v);
  }

  for (RankId r = 0; r < p; ++r) {
    RankView& view = views[r];
    const std::size_t k = view.owned.size();
    view.own_offsets.assign(k + 1, 0);
    view.ghost_offsets.assign(k + 1, 0);
    view.peer_offsets.assign(k + 1, 0);
    view.is_boundary.assign(k, 0);

    // First collect ghosts so ghost indices are dense and sorted.
    for (VertexId v : view.owned)
      for (VertexId w : g.adj(v))
        if (part.owner[w] != r) view.ghosts.push_back(w);
    std::sort(view.ghosts.begin(), view.ghosts.end());
    view.ghosts.erase(std::unique(view.ghosts.begin(), view.ghosts.end()),
                      view.ghosts.end());
    view.ghost_owner.resize(view.ghosts.size());
    view.ghost_index.reserve(view.ghosts.size());
    for (std::uint32_t gi = 0; gi < view.ghosts.size(); ++gi) {
      view.ghost_owner[gi] = part.owner[view.ghosts[gi]];
      view.ghost_index.emplace(view.ghosts[gi], gi);
    }

    std::vector<RankId> peer_scratch;
    for (std::uint32_t i = 0; i < k; ++i) {
      const VertexId v = view.owned[i];
      peer_scratch.clear();
      for (VertexId w : g.adj(v)) {
        if (part.owner[w] == r) {
          view.own_adj.push_back(local_of[w]);
        } else {
          view.ghost_adj.push_back(view.ghost_index.at(w));
          peer_scratch.push_back(part.owner[w]);
        }
      }
      std::sort(peer_scratch.begin(), peer_scratch.end());
      peer_scratch.erase(std::unique(peer_scratch.begin(), peer_scratch.end()),
                         peer_scratch.end());
      view.peer_ranks.insert(view.peer_ranks.end(), peer_scratch.begin(),
                             peer_scratch.end());
      view.is_boundary[i] = peer_scratch.empty() ? 0 : 1;
      view.own_offsets[i + 1] = static_cast<std::uint32_t>(view.own_adj.size());
      view.ghost_offsets[i + 1] = static_cast<std::uint32_t>(view.ghost_adj.size());
      view.peer_offsets[i + 1] = static_cast<std::uint32_t>(view.peer_ranks.size());
    }

    view.neighbor_ranks.assign(view.ghost_owner.begin(), view.ghost_owner.end());
    std::sort(view.neighbor_ranks.begin(), view.neighbor_ranks.end());
    view.neighbor_ranks.erase(
        std::unique(view.neighbor_ranks.begin(), view.neighbor_ranks.end()),
        view.neighbor_ranks.end());
  }
  return views;
}

}  // namespace distcolor
