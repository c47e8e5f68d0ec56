#include <doctest.h>

#include <numeric>

#include "distcolor/greedy.hpp"
#include "distcolor/recolor.hpp"
#include "distcolor/rmat.hpp"
#include "support.hpp"

using namespace distcolor;

namespace {

Partition explicit_owners(std::vector<RankId> owners, RankId p) {
  Partition part;
  part.num_ranks = p;
  part.owner = std::move(owners);
  return part;
}

ColorClassPermutation identity_perm(Color num_colors) {
  ColorClassPermutation perm;
  perm.kind = PermutationKind::Reverse;  // kind label irrelevant here
  perm.order.resize(num_colors);
  std::iota(perm.order.begin(), perm.order.end(), 1);
  return perm;
}

Coloring greedy_natural(const Graph& g, std::uint64_t seed = 1) {
  std::vector<VertexId> order(g.num_vertices());
  std::iota(order.begin(), order.end(), 0);
  return greedy_color(g, order, SelectionSpec::first_fit(), seed);
}

/// The two-rank boundary scenario from the piggybacking discussion: rank 0
/// owns vA,vB,vC recolored at steps 12,1,3; rank 1 owns vD,vE,vF at steps
/// 5,7,9; identity permutation makes colors double as steps.
struct PiggyScenario {
  Graph g = testsupport::from_pairs(
      6, {{1, 3}, {2, 3}, {0, 3}, {1, 4}, {2, 4}, {2, 5}});
  std::vector<RankView> views =
      build_rank_views(g, explicit_owners({0, 0, 0, 1, 1, 1}, 2));
  Coloring coloring;
  ColorClassPermutation perm = identity_perm(12);

  PiggyScenario() {
    coloring = Coloring(6);
    coloring.values = {12, 1, 3, 5, 7, 9};
  }
};

}  // namespace

TEST_CASE("class permutation: reverse, NI, ND and ties") {
  SplitRng rng(1);
  std::vector<std::uint64_t> sizes = {0, 5, 3, 9};  // index 0 unused
  auto nd = build_class_permutation(sizes, PermutationKind::NonDecreasing, rng);
  CHECK(nd.order == std::vector<Color>{2, 1, 3});

  std::vector<std::uint64_t> four = {0, 1, 1, 1, 1};
  auto rv = build_class_permutation(four, PermutationKind::Reverse, rng);
  CHECK(rv.order == std::vector<Color>{4, 3, 2, 1});

  std::vector<std::uint64_t> tied = {0, 2, 2};
  auto ni = build_class_permutation(tied, PermutationKind::NonIncreasing, rng);
  CHECK(ni.order == std::vector<Color>{1, 2});

  auto rand_perm = build_class_permutation(four, PermutationKind::Random, rng);
  std::vector<Color> sorted = rand_perm.order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Color>{1, 2, 3, 4});
}

TEST_CASE("class permutation: rejects missing size entries") {
  SplitRng rng(1);
  std::vector<std::uint64_t> empty;
  CHECK_THROWS_AS(
      (void)build_class_permutation(empty, PermutationKind::Reverse, rng),
      ValidationError);
}

TEST_CASE("piggyback plan: flush steps strictly increase and never fire empty") {
  for (std::uint64_t seed : {4, 5, 6}) {
    Graph g = testsupport::random_graph(80, 320, seed);
    Coloring input = greedy_natural(g, seed);
    for (RankId p : {2u, 4u}) {
      auto views = build_rank_views(g, block_partition(g, p));
      auto perm = build_class_permutation(input.class_sizes(),
                                          PermutationKind::Random, SplitRng(seed));
      auto plan = plan_piggyback(views, perm, input);
      for (const auto& channel : plan.channels) {
        std::uint32_t prev = 0;
        for (const auto& flush : channel.flushes) {
          CHECK(!flush.vertices.empty());
          CHECK(flush.step > prev);
          prev = flush.step;
          CHECK(flush.step <= perm.num_steps());
        }
      }
    }
  }
}

TEST_CASE("recolor_sync: P3 reverse permutation hand example") {
  Graph g = testsupport::path3();
  auto views = build_rank_views(g, block_partition(g, 1));
  Coloring input(3);
  input.values = {1, 2, 1};
  ColorClassPermutation reverse;
  reverse.kind = PermutationKind::Reverse;
  reverse.order = {2, 1};
  auto result = recolor_sync(g, views, input, reverse);
  CHECK(result.coloring.values == std::vector<Color>{2, 1, 2});
  CHECK(result.coloring.num_colors() == 2);
}

TEST_CASE("recolor_sync: identity permutation of a first-fit coloring is a fixed point") {
  Graph g = testsupport::random_graph(40, 120, 2);
  Coloring input = greedy_natural(g);
  auto views = build_rank_views(g, block_partition(g, 1));
  auto result = recolor_sync(g, views, input, identity_perm(input.num_colors()));
  CHECK(result.coloring.values == input.values);
}

TEST_CASE("recolor_sync: empty classes are pure barriers") {
  Graph g = testsupport::path4();
  auto views = build_rank_views(g, block_partition(g, 1));
  Coloring input(4);
  input.values = {1, 3, 1, 3};  // class 2 empty
  auto result = recolor_sync(g, views, input, identity_perm(3));
  CHECK(result.coloring.values == std::vector<Color>{1, 2, 1, 2});
  CHECK(result.metrics.supersteps == 3);
}

TEST_CASE("recolor_sync: rejects conflicted input before mutating") {
  Graph g = testsupport::triangle();
  auto views = build_rank_views(g, block_partition(g, 1));
  Coloring bad(3);
  bad.values = {1, 1, 2};
  CHECK_THROWS_AS(
      (void)recolor_sync(g, views, bad, identity_perm(2)), ValidationError);
}

TEST_CASE("recolor_sync: never increases the color count (first fit)") {
  const std::vector<PermutationKind> kinds = {
      PermutationKind::Reverse, PermutationKind::NonIncreasing,
      PermutationKind::NonDecreasing, PermutationKind::Random};
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Graph g = testsupport::random_graph(56, 190, seed);
    auto views = build_rank_views(g, block_partition(g, 1));
    Coloring current = greedy_natural(g, seed);
    for (PermutationKind kind : kinds) {
      auto perm = build_class_permutation(current.class_sizes(), kind,
                                          SplitRng(seed).stream(7));
      auto result = recolor_sync(g, views, current, perm);
      CHECK(result.coloring.num_colors() <= current.num_colors());
      CHECK(check_validity(g, result.coloring).empty());
      current = result.coloring;
    }
  }
}

TEST_CASE("recolor_sync: distribution invariance across rank counts") {
  for (std::uint64_t seed : {3, 4, 5}) {
    Graph g = testsupport::random_graph(64, 210, seed);
    Coloring input = greedy_natural(g, seed);
    auto perm = build_class_permutation(input.class_sizes(),
                                        PermutationKind::NonDecreasing,
                                        SplitRng(seed));
    auto base_views = build_rank_views(g, block_partition(g, 1));
    auto baseline = recolor_sync(g, base_views, input, perm);
    for (RankId p : {2, 4, 8}) {
      auto views = build_rank_views(g, block_partition(g, p));
      for (bool piggyback : {false, true}) {
        auto result = recolor_sync(g, views, input, perm,
                                   SelectionSpec::first_fit(), piggyback, seed);
        CHECK(result.coloring.values == baseline.coloring.values);
      }
    }
  }
}

TEST_CASE("recolor_sync: random-x selection is also rank-count invariant") {
  Graph g = testsupport::random_graph(48, 150, 9);
  Coloring input = greedy_natural(g, 9);
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::Random, SplitRng(42));
  auto views1 = build_rank_views(g, block_partition(g, 1));
  auto views4 = build_rank_views(g, block_partition(g, 4));
  auto a = recolor_sync(g, views1, input, perm, SelectionSpec::random_x(3),
                        false, 11);
  auto b = recolor_sync(g, views4, input, perm, SelectionSpec::random_x(3),
                        false, 11);
  CHECK(a.coloring.values == b.coloring.values);
}

TEST_CASE("piggyback plan: figure-two scenario flushes") {
  PiggyScenario s;
  auto plan = plan_piggyback(s.views, s.perm, s.coloring);
  CHECK(plan.precomm_messages == 2);
  REQUIRE(plan.channels.size() == 2);

  const auto* p0_to_p1 = plan.find(0, 1);
  REQUIRE(p0_to_p1 != nullptr);
  REQUIRE(p0_to_p1->flushes.size() == 1);
  CHECK(p0_to_p1->flushes[0].step == 4);
  CHECK(p0_to_p1->flushes[0].vertices == std::vector<VertexId>{1, 2});  // vB, vC
  CHECK(p0_to_p1->final_flush == std::vector<VertexId>{0});             // vA

  const auto* p1_to_p0 = plan.find(1, 0);
  REQUIRE(p1_to_p0 != nullptr);
  REQUIRE(p1_to_p0->flushes.size() == 1);
  CHECK(p1_to_p0->flushes[0].step == 11);
  CHECK(p1_to_p0->flushes[0].vertices == std::vector<VertexId>{3});     // vD
  CHECK(p1_to_p0->final_flush == std::vector<VertexId>{4, 5});          // vE, vF
}

TEST_CASE("piggyback plan: figure-two message counts, 6 baseline vs 4 piggybacked") {
  PiggyScenario s;
  auto baseline = recolor_sync(s.g, s.views, s.coloring, s.perm,
                               SelectionSpec::first_fit(), /*piggyback=*/false);
  CHECK(baseline.metrics.nonempty_messages == 6);
  CHECK(baseline.metrics.messages == 24);  // 2 channels x 12 steps

  auto piggy = recolor_sync(s.g, s.views, s.coloring, s.perm,
                            SelectionSpec::first_fit(), /*piggyback=*/true);
  CHECK(piggy.metrics.nonempty_messages == 4);
  CHECK(piggy.metrics.messages == 4);
  CHECK(piggy.metrics.empty_messages() == 0);
  CHECK(piggy.metrics.precomm_messages == 2);

  // Deferred messaging must not change the result.
  CHECK(piggy.coloring.values == baseline.coloring.values);
  CHECK(piggy.coloring.num_colors() == 2);
}

TEST_CASE("piggyback plan: no cross edges, no channel") {
  Graph g = testsupport::from_pairs(4, {{0, 1}, {2, 3}});
  auto views = build_rank_views(g, explicit_owners({0, 0, 1, 1}, 2));
  Coloring input(4);
  input.values = {1, 2, 1, 2};
  auto plan = plan_piggyback(views, identity_perm(2), input);
  CHECK(plan.channels.empty());
  CHECK(plan.precomm_messages == 0);
}

TEST_CASE("piggyback plan: single dependency gets one mid flush plus end flushes") {
  // Edge (1,2) across ranks; 1 colored at step 1, 2 at step 2. Vertex 1
  // must reach rank 1 before step 2; vertex 2 only matters next iteration.
  Graph g = testsupport::path3();
  auto views = build_rank_views(g, explicit_owners({0, 0, 1}, 2));
  Coloring input(3);
  input.values = {2, 1, 2};
  auto plan = plan_piggyback(views, identity_perm(2), input);
  const auto* out = plan.find(0, 1);
  REQUIRE(out != nullptr);
  REQUIRE(out->flushes.size() == 1);
  CHECK(out->flushes[0].step == 1);
  CHECK(out->flushes[0].vertices == std::vector<VertexId>{1});
  CHECK(out->final_flush.empty());
  const auto* back = plan.find(1, 0);
  REQUIRE(back != nullptr);
  CHECK(back->flushes.empty());
  CHECK(back->final_flush == std::vector<VertexId>{2});
}

TEST_CASE("piggyback: transparent and message-reducing on a spread instance") {
  for (std::uint64_t seed : {1, 2}) {
    Graph g = testsupport::random_graph(96, 400, seed);
    Coloring input = greedy_natural(g, seed);
    auto views = build_rank_views(g, block_partition(g, 4));
    auto perm = build_class_permutation(input.class_sizes(),
                                        PermutationKind::NonDecreasing,
                                        SplitRng(seed));
    auto off = recolor_sync(g, views, input, perm, SelectionSpec::first_fit(),
                            false, seed);
    auto on = recolor_sync(g, views, input, perm, SelectionSpec::first_fit(),
                           true, seed);
    CHECK(on.coloring.values == off.coloring.values);
    CHECK(on.metrics.empty_messages() == 0);
    CHECK(on.metrics.nonempty_messages <= off.metrics.nonempty_messages);
    CHECK(on.metrics.messages < off.metrics.messages);
  }
}

TEST_CASE("recolor_iterations: zero iterations returns the input") {
  Graph g = testsupport::petersen();
  auto views = build_rank_views(g, block_partition(g, 2));
  Coloring input = greedy_natural(g);
  PermutationSchedule schedule;
  schedule.iterations = 0;
  auto result = recolor_iterations(g, views, input, schedule);
  CHECK(result.coloring.values == input.values);
  CHECK(result.metrics.trajectory == std::vector<Color>{input.num_colors()});
}

TEST_CASE("schedule: random injection rules") {
  PermutationSchedule every5;
  every5.injection = InjectionRule::EveryX;
  every5.every_x = 5;
  std::vector<std::uint32_t> fired;
  for (std::uint32_t i = 1; i <= 10; ++i)
    if (every5.random_fires(i)) fired.push_back(i);
  CHECK(fired == std::vector<std::uint32_t>{5, 10});

  PermutationSchedule pow2;
  pow2.injection = InjectionRule::PowersOfTwo;
  fired.clear();
  for (std::uint32_t i = 1; i <= 10; ++i)
    if (pow2.random_fires(i)) fired.push_back(i);
  CHECK(fired == std::vector<std::uint32_t>{2, 4, 8});

  PermutationSchedule every1;
  every1.injection = InjectionRule::EveryX;
  every1.every_x = 1;
  for (std::uint32_t i = 1; i <= 4; ++i) CHECK(every1.random_fires(i));
}

TEST_CASE("recolor_iterations: trajectory is non-increasing across schedules") {
  Graph g = testsupport::random_graph(72, 260, 6);
  auto views = build_rank_views(g, block_partition(g, 4));
  Coloring input = greedy_natural(g, 6);
  for (InjectionRule rule : {InjectionRule::None, InjectionRule::EveryX,
                             InjectionRule::PowersOfTwo}) {
    PermutationSchedule schedule;
    schedule.base = PermutationKind::NonDecreasing;
    schedule.injection = rule;
    schedule.every_x = 5;
    schedule.iterations = 12;
    auto result = recolor_iterations(g, views, input, schedule,
                                     SelectionSpec::first_fit(), true, 3);
    REQUIRE(result.metrics.trajectory.size() == 13);
    CHECK(result.metrics.trajectory.front() == input.num_colors());
    for (std::size_t i = 1; i < result.metrics.trajectory.size(); ++i)
      CHECK(result.metrics.trajectory[i] <= result.metrics.trajectory[i - 1]);
    CHECK(check_validity(g, result.coloring).empty());
  }
}

TEST_CASE("recolor_sync: threaded backend matches deterministic") {
  Graph g = testsupport::random_graph(80, 300, 12);
  Coloring input = greedy_natural(g, 12);
  auto views = build_rank_views(g, block_partition(g, 4));
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::NonDecreasing,
                                      SplitRng(12));
  for (bool piggyback : {false, true}) {
    auto det = recolor_sync(g, views, input, perm, SelectionSpec::first_fit(),
                            piggyback, 1, Backend::Deterministic);
    auto thr = recolor_sync(g, views, input, perm, SelectionSpec::first_fit(),
                            piggyback, 1, Backend::Threaded);
    CHECK(det.coloring.values == thr.coloring.values);
    CHECK(det.metrics.messages == thr.metrics.messages);
    CHECK(det.metrics.nonempty_messages == thr.metrics.nonempty_messages);
  }
}

TEST_CASE("recolor_async: single rank equals recolor_sync") {
  Graph g = testsupport::random_graph(50, 160, 8);
  Coloring input = greedy_natural(g, 8);
  auto views = build_rank_views(g, block_partition(g, 1));
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::Reverse, SplitRng(8));
  auto sync = recolor_sync(g, views, input, perm);
  ProtocolConfig cfg;
  cfg.seed = 8;
  auto async = recolor_async(g, views, input, perm, cfg);
  CHECK(async.coloring.values == sync.coloring.values);
}

TEST_CASE("recolor_async: split path stays valid and small") {
  Graph g = testsupport::path3();
  auto views = build_rank_views(g, explicit_owners({0, 0, 1}, 2));
  Coloring input(3);
  input.values = {1, 2, 1};
  for (PermutationKind kind : {PermutationKind::Reverse, PermutationKind::Random}) {
    auto perm = build_class_permutation(input.class_sizes(), kind, SplitRng(4));
    ProtocolConfig cfg;
    cfg.seed = 4;
    auto result = recolor_async(g, views, input, perm, cfg);
    CHECK(check_validity(g, result.coloring).empty());
    CHECK(result.coloring.num_colors() <= 3);
  }
}

TEST_CASE("recolor_async: threaded sync backend matches deterministic") {
  Graph g = testsupport::random_graph(72, 260, 15);
  auto views = build_rank_views(g, block_partition(g, 4));
  Coloring input = greedy_natural(g, 15);
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::NonDecreasing,
                                      SplitRng(15));
  ProtocolConfig cfg;
  cfg.seed = 31;
  cfg.superstep_size = 8;
  auto det = recolor_async(g, views, input, perm, cfg);
  cfg.backend = Backend::Threaded;
  auto thr = recolor_async(g, views, input, perm, cfg);
  CHECK(det.coloring.values == thr.coloring.values);
}

TEST_CASE("recolor_async: asynchronous mode stays valid") {
  Graph g = testsupport::random_graph(64, 220, 16);
  auto views = build_rank_views(g, block_partition(g, 4));
  Coloring input = greedy_natural(g, 16);
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::Random, SplitRng(16));
  ProtocolConfig cfg;
  cfg.seed = 5;
  cfg.superstep_size = 4;
  cfg.mode = CommMode::Asynchronous;
  cfg.async_lag = 2;
  auto result = recolor_async(g, views, input, perm, cfg);
  CHECK(check_validity(g, result.coloring).empty());
}

TEST_CASE("recolor_async: deterministic under a fixed seed") {
  RmatParams params{9, 6, 0.45, 0.15, 0.15, 0.25, 3};
  Graph g = generate_rmat(params);
  auto views = build_rank_views(g, block_partition(g, 4));
  ProtocolConfig cfg;
  cfg.seed = 21;
  cfg.superstep_size = 16;
  Coloring input = run_protocol(g, views, cfg).coloring;
  auto perm = build_class_permutation(input.class_sizes(),
                                      PermutationKind::NonDecreasing,
                                      SplitRng(21));
  auto a = recolor_async(g, views, input, perm, cfg);
  auto b = recolor_async(g, views, input, perm, cfg);
  CHECK(a.coloring.values == b.coloring.values);
  CHECK(check_validity(g, a.coloring).empty());
}
