#include <doctest.h>

#include <sstream>

#include "distcolor/graph.hpp"
#include "distcolor/graph_io.hpp"
#include "distcolor/partition.hpp"
#include "distcolor/rmat.hpp"
#include "support.hpp"

using namespace distcolor;

TEST_CASE("graph construction symmetrizes and deduplicates") {
  // (0,1) twice, both directions, plus a self-loop.
  Graph g = testsupport::from_pairs(3, {{0, 1}, {1, 0}, {0, 1}, {2, 2}, {1, 2}});
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(!g.has_edge(0, 2));
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("graph adjacency is strictly sorted") {
  Graph g = testsupport::petersen();
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    auto a = g.adj(v);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1] < a[i]);
  }
  CHECK(g.max_degree() == 3);
  CHECK(g.num_edges() == 15);
}

TEST_CASE("matrix market: symmetric pattern path") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate pattern symmetric\n"
      "% path on three vertices\n"
      "3 3 2\n"
      "2 1\n"
      "3 2\n");
  Graph g = load_matrix_market(in);
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
}

TEST_CASE("matrix market: self-loop dropped") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate pattern general\n"
      "2 2 2\n"
      "1 1\n"
      "1 2\n");
  Graph g = load_matrix_market(in);
  CHECK(g.num_edges() == 1);
  CHECK(!g.has_edge(0, 0));
}

TEST_CASE("matrix market: general mirror pair merges") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 2\n"
      "1 2 3.5\n"
      "2 1 -1.0\n");
  Graph g = load_matrix_market(in);
  CHECK(g.num_edges() == 1);
}

TEST_CASE("matrix market: distinct parse errors") {
  std::istringstream bad_header("%%NotMatrixMarket x y z w\n1 1 0\n");
  CHECK_THROWS_AS((void)load_matrix_market(bad_header), ParseError);

  std::istringstream out_of_bounds(
      "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n");
  CHECK_THROWS_AS((void)load_matrix_market(out_of_bounds), ParseError);

  std::istringstream empty(
      "%%MatrixMarket matrix coordinate pattern general\n0 0 0\n");
  CHECK_THROWS_AS((void)load_matrix_market(empty), ParseError);

  std::istringstream truncated(
      "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n");
  CHECK_THROWS_AS((void)load_matrix_market(truncated), ParseError);
}

TEST_CASE("edge list round trip") {
  Graph g = testsupport::k23();
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  Graph h = load_edge_list(in);
  CHECK(h.num_vertices() == g.num_vertices());
  CHECK(h.num_edges() == g.num_edges());
  g.for_each_edge([&](VertexId u, VertexId v) { CHECK(h.has_edge(u, v)); });
}

TEST_CASE("block partition splits into ceil/floor ranges") {
  Graph g = testsupport::random_graph(10, 15, 7);
  Partition part = block_partition(g, 4);
  std::vector<int> counts(4, 0);
  for (RankId r : part.owner) ++counts[r];
  CHECK(counts == std::vector<int>{3, 3, 2, 2});

  Graph g6 = testsupport::random_graph(6, 8, 7);
  Partition all_one = block_partition(g6, 1);
  for (RankId r : all_one.owner) CHECK(r == 0);
  Partition each = block_partition(g6, 6);
  for (VertexId v = 0; v < 6; ++v) CHECK(each[v] == v);

  CHECK_THROWS_AS((void)block_partition(g6, 0), ValidationError);
  CHECK_THROWS_AS((void)block_partition(g6, 7), ValidationError);
}

TEST_CASE("partition file loading") {
  Graph g = testsupport::path4();
  std::istringstream ok("0\n0\n1\n1\n");
  Partition part = load_partition_file(ok, g, 2);
  CHECK(part.owner == std::vector<RankId>{0, 0, 1, 1});

  std::istringstream out_of_range("0\n0\n5\n1\n");
  CHECK_THROWS_AS((void)load_partition_file(out_of_range, g, 2), ParseError);

  std::istringstream short_file("0\n0\n1\n");
  CHECK_THROWS_AS((void)load_partition_file(short_file, g, 2), ParseError);
}

TEST_CASE("rank views: boundary classification on a path") {
  Graph g = testsupport::path3();
  Partition part;
  part.num_ranks = 2;
  part.owner = {0, 0, 1};
  auto views = build_rank_views(g, part);
  REQUIRE(views.size() == 2);
  // Rank 0 owns {0,1}: vertex 1 is boundary, vertex 0 internal.
  CHECK(views[0].owned == std::vector<VertexId>{0, 1});
  CHECK(views[0].is_boundary[0] == 0);
  CHECK(views[0].is_boundary[1] == 1);
  CHECK(views[0].ghosts == std::vector<VertexId>{2});
  // Rank 1 owns {2}: boundary.
  CHECK(views[1].is_boundary[0] == 1);
  CHECK(views[1].neighbor_ranks == std::vector<RankId>{0});
}

TEST_CASE("rank views: single rank means all internal") {
  Graph g = testsupport::petersen();
  auto views = build_rank_views(g, block_partition(g, 1));
  for (auto b : views[0].is_boundary) CHECK(b == 0);
  CHECK(views[0].ghosts.empty());
}

TEST_CASE("rank views: triangle across three ranks is all boundary") {
  Graph g = testsupport::triangle();
  Partition part;
  part.num_ranks = 3;
  part.owner = {0, 1, 2};
  auto views = build_rank_views(g, part);
  for (const auto& view : views) {
    REQUIRE(view.owned_count() == 1);
    CHECK(view.is_boundary[0] == 1);
    CHECK(view.ghosts.size() == 2);
    CHECK(view.neighbor_ranks.size() == 2);
  }
}

TEST_CASE("rank views: every cross edge in exactly two views, intra in one") {
  Graph g = testsupport::random_graph(64, 200, 3);
  for (RankId p : {2, 4, 8}) {
    Partition part = block_partition(g, p);
    auto views = build_rank_views(g, part);
    std::uint64_t intra = 0, cross_mentions = 0, cross = 0;
    for (const auto& view : views) {
      intra += view.own_adj.size();
      cross_mentions += view.ghost_adj.size();
    }
    g.for_each_edge([&](VertexId u, VertexId v) {
      if (part[u] != part[v]) ++cross;
    });
    CHECK(intra / 2 + cross == g.num_edges());
    CHECK(cross_mentions == 2 * cross);
  }
}

TEST_CASE("internal-vertex fraction non-increasing in rank count") {
  Graph g = testsupport::random_graph(128, 512, 11);
  std::uint64_t prev_internal = g.num_vertices();
  for (RankId p : {1, 2, 4, 8, 16}) {
    auto views = build_rank_views(g, block_partition(g, p));
    std::uint64_t internal = 0;
    for (const auto& view : views)
      for (auto b : view.is_boundary)
        if (!b) ++internal;
    CHECK(internal <= prev_internal);
    prev_internal = internal;
  }
}

TEST_CASE("rmat: scale 1 has at most one edge") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    RmatParams params{1, 1, 0.25, 0.25, 0.25, 0.25, seed};
    Graph g = generate_rmat(params);
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_edges() <= 1);
  }
}

TEST_CASE("rmat: deterministic and degree-sane at scale 14") {
  RmatParams params{14, 8, 0.25, 0.25, 0.25, 0.25, 1};
  Graph a = generate_rmat(params);
  Graph b = generate_rmat(params);
  CHECK(a.num_vertices() == b.num_vertices());
  CHECK(a.num_edges() == b.num_edges());
  for (VertexId v = 0; v < a.num_vertices(); ++v) {
    REQUIRE(a.degree(v) == b.degree(v));
    auto aa = a.adj(v);
    auto bb = b.adj(v);
    for (std::size_t i = 0; i < aa.size(); ++i) REQUIRE(aa[i] == bb[i]);
  }
  CHECK(a.num_vertices() == 16384);
  CHECK(a.num_edges() <= 8 * 16384);
  const double avg_degree = 2.0 * a.num_edges() / a.num_vertices();
  CHECK(a.max_degree() >= avg_degree);
  CHECK(a.max_degree() <= 4 * avg_degree);
}

TEST_CASE("rmat: parameter validation") {
  RmatParams bad_sum{4, 2, 0.5, 0.5, 0.5, 0.5, 1};
  CHECK_THROWS_AS((void)generate_rmat(bad_sum), ValidationError);
  RmatParams ok{4, 2, 0.45, 0.15, 0.15, 0.25, 1};
  CHECK_NOTHROW((void)generate_rmat(ok));
  RmatParams huge{30, 16, 0.25, 0.25, 0.25, 0.25, 1};
  CHECK_THROWS_AS((void)generate_rmat(huge, /*memory_cap_bytes=*/1 << 20),
                  ValidationError);
}

TEST_CASE("rmat: skewed distribution concentrates degree") {
  RmatParams er{12, 8, 0.25, 0.25, 0.25, 0.25, 9};
  RmatParams bad{12, 8, 0.55, 0.15, 0.15, 0.15, 9};
  Graph g_er = generate_rmat(er);
  Graph g_bad = generate_rmat(bad);
  CHECK(g_bad.max_degree() > g_er.max_degree());
}
