#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "distcolor/coloring.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/greedy.hpp"
#include "distcolor/mailbox.hpp"
#include "distcolor/metrics.hpp"
#include "distcolor/ordering.hpp"
#include "distcolor/partition.hpp"
#include "distcolor/rng.hpp"
#include "distcolor/selection.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

enum class CommMode { Synchronous, Asynchronous };
enum class Backend { Deterministic, Threaded };

inline const char* to_string(CommMode m) {
  return m == CommMode::Synchronous ? "sync" : "async";
}

struct ProtocolConfig {
  std::uint32_t superstep_size = 500;
  CommMode mode = CommMode::Synchronous;
  OrderingKind ordering = OrderingKind::Natural;
  SelectionSpec selection;
  std::uint64_t seed = 1;
  std::uint64_t max_rounds = 1000;
  std::uint32_t async_lag = 1;   // ticks before an async message is visible
  Backend backend = Backend::Deterministic;

  void validate() const {
    if (superstep_size < 1) throw ValidationError("protocol: superstep size must be >= 1");
    if (max_rounds < 1) throw ValidationError("protocol: round cap must be >= 1");
    if (async_lag < 1) throw ValidationError("protocol: async lag must be >= 1");
    selection.validate();
  }
};

/// Random total order over vertices used to break conflict ties; drawn once
/// before the run starts.
struct TotalOrder {
  std::vector<std::uint32_t> priority;  // injective over V

  static TotalOrder make_random(VertexId n, std::uint64_t seed) {
    TotalOrder t;
    std::vector<VertexId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    SplitRng rng = SplitRng(seed).stream(0x707a1);
    for (VertexId i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[static_cast<VertexId>(rng.below(i))]);
    t.priority.resize(n);
    for (VertexId i = 0; i < n; ++i) t.priority[perm[i]] = i;
    return t;
  }
};

struct ConflictDetail {
  VertexId kept = 0;
  VertexId recolored = 0;
  std::uint32_t kept_step = 0;       // within-round superstep tags
  std::uint32_t recolored_step = 0;
};

struct ProtocolResult {
  Coloring coloring;
  RunMetrics metrics;
};

/// Speculative round/superstep coloring over a simulated rank cluster.
///
/// Every round tentatively colors all currently uncolored vertices in
/// supersteps of `superstep_size`; boundary colors flush to neighbor ranks
/// at superstep end; a barrier closes the round; conflicts (equal-colored
/// cross edges) are detected by both owners independently and the lower
/// priority endpoint re-enters the next round. Synchronous mode gates each
/// rank on its neighbors' previous superstep; asynchronous mode lets ranks
/// proceed on whatever ghost information has arrived.
///
/// Two backends share all per-rank logic: a deterministic round-robin
/// scheduler (default, reproducible in both modes) and one worker thread
/// per rank. Synchronous results are identical across backends.
class ProtocolEngine {
 public:
  ProtocolEngine(const Graph& g, const std::vector<RankView>& views,
                 ProtocolConfig cfg)
      : g_(&g), views_(&views), cfg_(cfg),
        order_(TotalOrder::make_random(g.num_vertices(), cfg.seed)) {
    cfg_.validate();
    const RankId p = static_cast<RankId>(views.size());
    if (p == 0) throw ValidationError("protocol: no rank views");
    mailbox_ = std::make_unique<Mailbox>(p);
    details_by_rank_.resize(p);
    ranks_.reserve(p);
    for (RankId r = 0; r < p; ++r) ranks_.push_back(make_runtime(r));
  }

  /// Replaces the per-rank visit order (global ids over owned vertices).
  /// Used by asynchronous recoloring to inject class-derived orders.
  void set_visit_orders(const std::vector<std::vector<VertexId>>& orders) {
    if (orders.size() != ranks_.size())
      throw ValidationError("protocol: one visit order per rank required");
    for (RankId r = 0; r < ranks_.size(); ++r) set_visit(r, orders[r]);
  }

  /// One full round on the deterministic backend: supersteps, flushes,
  /// closing barrier. Conflicts are filled in by detect_and_resolve.
  RoundStats run_round() {
    RoundStats stats;
    const RankId p = num_ranks();
    std::vector<std::uint64_t> steps_needed(p);
    std::uint64_t max_steps = 0;
    for (RankId r = 0; r < p; ++r) {
      stats.uncolored_at_start += ranks_[r].pending.size();
      steps_needed[r] = ceil_div(ranks_[r].pending.size(), cfg_.superstep_size);
      max_steps = std::max(max_steps, steps_needed[r]);
    }
    const std::uint32_t lag =
        cfg_.mode == CommMode::Synchronous ? 1 : cfg_.async_lag;
    for (std::uint64_t k = 0; k < max_steps; ++k) {
      for (RankId r = 0; r < p; ++r)
        mailbox_->deliver_visible(r, tick_, [&](const ColorMessage& m) { apply(r, m); });
      for (RankId r = 0; r < p; ++r) {
        if (k >= steps_needed[r]) continue;
        stats.boundary_colored += superstep_work(r, static_cast<std::uint32_t>(k));
        flush_outboxes(r, static_cast<std::uint32_t>(k), tick_ + lag,
                       /*last=*/k + 1 == steps_needed[r]);
      }
      ++tick_;
      ++stats.supersteps;
    }
    // Round barrier: everything in flight lands before detection.
    for (RankId r = 0; r < p; ++r)
      mailbox_->drain(r, [&](const ColorMessage& m) { apply(r, m); });
    ++round_;
    return stats;
  }

  /// Detects equal-colored cross edges and reschedules the lower-priority
  /// endpoint of each. Both owners reach the same verdict independently;
  /// the conflict count tallies each conflicting edge exactly once (at the
  /// loser's owner). Returns the per-rank re-color sets as global ids.
  std::vector<std::vector<VertexId>> detect_and_resolve(RoundStats& stats) {
    const RankId p = num_ranks();
    std::vector<std::vector<VertexId>> recolor(p);
    for (RankId r = 0; r < p; ++r) {
      std::uint64_t conflicts = 0;
      recolor[r] = detect_rank(r, conflicts);
      stats.conflicts += conflicts;
    }
    for (RankId r = 0; r < p; ++r) clear_losers(r, recolor[r]);
    metrics_.conflicts += stats.conflicts;
    metrics_.per_round.push_back(stats);
    return recolor;
  }

  /// Rebuilds each rank's pending list (uncolored vertices, visit order).
  void refill_pending() {
    for (auto& rt : ranks_) {
      rt.pending.clear();
      rt.cursor = 0;
      for (std::uint32_t i : rt.visit)
        if (rt.color[i] == kUncolored) rt.pending.push_back(i);
    }
  }

  /// Full protocol on the configured backend.
  ProtocolResult run() {
    if (cfg_.backend == Backend::Threaded) return run_threaded();
    while (uncolored_total() > 0) {
      if (metrics_.rounds >= cfg_.max_rounds)
        throw ConvergenceError("protocol: round cap exceeded (" +
                               std::to_string(cfg_.max_rounds) + ")");
      const std::uint64_t before = uncolored_total();
      RoundStats stats = run_round();
      detect_and_resolve(stats);
      refill_pending();
      ++metrics_.rounds;
      metrics_.supersteps += stats.supersteps;
      if (uncolored_total() >= before)
        throw ConvergenceError("protocol: round made no progress");
    }
    return finish();
  }

  std::uint64_t uncolored_total() const {
    std::uint64_t total = 0;
    for (const auto& rt : ranks_) total += rt.pending.size();
    return total;
  }

  std::vector<ConflictDetail> conflict_details() const {
    std::vector<ConflictDetail> all;
    for (const auto& per_rank : details_by_rank_)
      all.insert(all.end(), per_rank.begin(), per_rank.end());
    return all;
  }

  const TotalOrder& total_order() const { return order_; }

  /// Assembles the (possibly partial) global coloring.
  Coloring snapshot() const {
    Coloring c(g_->num_vertices());
    for (const auto& rt : ranks_)
      for (std::uint32_t i = 0; i < rt.color.size(); ++i)
        c[rt.view->owned[i]] = rt.color[i];
    return c;
  }

 private:
  struct RankRuntime {
    const RankView* view = nullptr;
    std::vector<Color> color;            // by owned idx; 0 = uncolored
    std::vector<Color> ghost_color;      // by ghost idx; 0 = unknown
    std::vector<std::uint32_t> ghost_step;
    std::vector<std::uint32_t> visit;    // owned idxs, fixed visit order
    std::vector<std::uint32_t> pending;  // owned idxs, this round, visit order
    std::size_t cursor = 0;
    std::vector<std::uint32_t> attempt;  // colorings so far, per owned idx
    std::vector<std::uint32_t> step_of;  // within-round superstep of last coloring
    std::vector<std::uint64_t> round_of;
    std::optional<ColorChooser> chooser;
    std::vector<std::vector<std::pair<VertexId, Color>>> outbox;  // by rank id
    detail::ForbiddenStamps forbidden;
  };

  static std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return b == 0 ? 0 : (a + b - 1) / b;
  }

  RankId num_ranks() const { return static_cast<RankId>(ranks_.size()); }

  RankRuntime make_runtime(RankId r) {
    RankRuntime rt;
    rt.view = &(*views_)[r];
    const std::size_t k = rt.view->owned_count();
    rt.color.assign(k, kUncolored);
    rt.ghost_color.assign(rt.view->ghosts.size(), kUncolored);
    rt.ghost_step.assign(rt.view->ghosts.size(), 0);
    rt.attempt.assign(k, 0);
    rt.step_of.assign(k, 0);
    rt.round_of.assign(k, 0);
    rt.outbox.resize(views_->size());
    rt.chooser.emplace(cfg_.selection, r, static_cast<RankId>(views_->size()),
                       g_->max_degree() + 1, cfg_.seed);
    auto order = order_vertices(RankScope{rt.view}, cfg_.ordering);
    rt.visit.reserve(k);
    for (VertexId v : order) rt.visit.push_back(owned_index(*rt.view, v));
    rt.pending = rt.visit;
    return rt;
  }

  static std::uint32_t owned_index(const RankView& view, VertexId v) {
    auto it = std::lower_bound(view.owned.begin(), view.owned.end(), v);
    if (it == view.owned.end() || *it != v)
      throw ValidationError("protocol: vertex not owned by rank");
    return static_cast<std::uint32_t>(it - view.owned.begin());
  }

  void set_visit(RankId r, const std::vector<VertexId>& order) {
    RankRuntime& rt = ranks_[r];
    if (order.size() != rt.view->owned_count())
      throw ValidationError("protocol: visit order size mismatch");
    rt.visit.clear();
    for (VertexId v : order) rt.visit.push_back(owned_index(*rt.view, v));
    rt.pending = rt.visit;
    rt.cursor = 0;
  }

  /// Colors up to superstep_size pending vertices on rank r; returns how
  /// many of them were boundary vertices (whose colors entered outboxes).
  std::uint64_t superstep_work(RankId r, std::uint32_t step_tag) {
    RankRuntime& rt = ranks_[r];
    const RankView& view = *rt.view;
    std::uint64_t boundary = 0;
    std::uint32_t budget = cfg_.superstep_size;
    while (rt.cursor < rt.pending.size() && budget > 0) {
      const std::uint32_t i = rt.pending[rt.cursor++];
      --budget;
      rt.forbidden.begin_vertex();
      for (std::uint32_t j : view.owned_neighbors(i))
        if (rt.color[j] != kUncolored) rt.forbidden.mark(rt.color[j]);
      for (std::uint32_t gi : view.ghost_neighbors(i))
        if (rt.ghost_color[gi] != kUncolored) rt.forbidden.mark(rt.ghost_color[gi]);
      const Color c = rt.chooser->pick(rt.forbidden, view.owned[i], rt.attempt[i]);
      ++rt.attempt[i];
      rt.color[i] = c;
      rt.chooser->note_assigned(c);
      rt.step_of[i] = step_tag;
      rt.round_of[i] = round_;
      if (view.is_boundary[i]) {
        ++boundary;
        for (RankId q : view.peers(i))
          rt.outbox[q].emplace_back(view.owned[i], c);
      }
    }
    return boundary;
  }

  /// Superstep-end flush. Synchronous mode sends to every neighbor rank,
  /// empty messages included (a rank that colored no boundary vertex still
  /// signals superstep completion); asynchronous mode sends only payloads.
  void flush_outboxes(RankId r, std::uint32_t tag, std::uint64_t visible_at, bool last) {
    RankRuntime& rt = ranks_[r];
    for (RankId q : rt.view->neighbor_ranks) {
      auto& box = rt.outbox[q];
      if (cfg_.mode == CommMode::Asynchronous && box.empty()) continue;
      ColorMessage msg{r, tag, visible_at, last, std::move(box)};
      box.clear();
      if (concurrent_) concurrent_->send(r, q, std::move(msg));
      else mailbox_->send(r, q, std::move(msg));
    }
  }

  void apply(RankId r, const ColorMessage& msg) {
    RankRuntime& rt = ranks_[r];
    for (auto [v, c] : msg.payload) {
      const std::uint32_t gi = rt.view->ghost_index.at(v);
      rt.ghost_color[gi] = c;
      rt.ghost_step[gi] = msg.tag;
    }
  }

  std::vector<VertexId> detect_rank(RankId r, std::uint64_t& edge_conflicts) {
    RankRuntime& rt = ranks_[r];
    const RankView& view = *rt.view;
    std::vector<VertexId> losers;
    std::vector<std::uint8_t> lost(rt.color.size(), 0);
    for (std::uint32_t i = 0; i < rt.color.size(); ++i) {
      if (rt.color[i] == kUncolored || !view.is_boundary[i]) continue;
      const VertexId u = view.owned[i];
      for (std::uint32_t gi : view.ghost_neighbors(i)) {
        if (rt.ghost_color[gi] != rt.color[i]) continue;
        const VertexId v = view.ghosts[gi];
        if (order_.priority[u] < order_.priority[v]) {
          // u loses this edge; count the edge here, on the loser's owner.
          ++edge_conflicts;
          if (!lost[i]) {
            lost[i] = 1;
            losers.push_back(u);
          }
          details_by_rank_[r].push_back({v, u, rt.ghost_step[gi], rt.step_of[i]});
        }
      }
    }
    return losers;
  }

  void clear_losers(RankId r, const std::vector<VertexId>& losers) {
    RankRuntime& rt = ranks_[r];
    for (VertexId u : losers) {
      const std::uint32_t i = owned_index(*rt.view, u);
      rt.chooser->note_cleared(rt.color[i]);
      rt.color[i] = kUncolored;
    }
  }

  ProtocolResult finish() {
    ProtocolResult result;
    result.coloring = snapshot();
    if (!result.coloring.complete())
      throw ValidationError("protocol: incomplete coloring at termination");
    if (!check_validity(*g_, result.coloring).empty())
      throw ValidationError("protocol: produced an invalid coloring");
    metrics_.num_colors = result.coloring.num_colors();
    metrics_.ticks += tick_;
    if (concurrent_) concurrent_->counters().flush_into(metrics_);
    else mailbox_->counters().flush_into(metrics_);
    result.metrics = metrics_;
    return result;
  }

  ProtocolResult run_threaded();

  const Graph* g_;
  const std::vector<RankView>* views_;
  ProtocolConfig cfg_;
  TotalOrder order_;
  std::vector<RankRuntime> ranks_;
  std::unique_ptr<Mailbox> mailbox_;
  std::unique_ptr<ConcurrentMailbox> concurrent_;
  RunMetrics metrics_;
  std::vector<std::vector<ConflictDetail>> details_by_rank_;
  std::uint64_t tick_ = 0;
  std::uint64_t round_ = 0;
};

/// Reusable rendezvous barrier for the threaded backend.
class RoundBarrier {
 public:
  explicit RoundBarrier(std::size_t n) : n_(n) {}
  void arrive_and_wait() {
    std::unique_lock lock(m_);
    const std::uint64_t gen = gen_;
    if (++count_ == n_) {
      count_ = 0;
      ++gen_;
      cv_.notify_all();
    } else {
      cv_.wait(lock, [&] { return gen_ != gen; });
    }
  }

 private:
  std::size_t n_;
  std::size_t count_ = 0;
  std::uint64_t gen_ = 0;
  std::mutex m_;
  std::condition_variable cv_;
};

inline ProtocolResult ProtocolEngine::run_threaded() {
  const RankId p = num_ranks();
  concurrent_ = std::make_unique<ConcurrentMailbox>(p);
  RoundBarrier barrier(p);
  std::vector<std::uint64_t> steps_needed(p, 0);
  std::vector<std::uint64_t> round_conflicts(p, 0);
  std::vector<std::uint64_t> round_boundary(p, 0);
  std::vector<std::uint64_t> round_uncolored(p, 0);
  std::atomic<bool> done{false};
  std::atomic<bool> failed{false};
  std::uint64_t rounds = 0;

  auto worker = [&](RankId r) {
    RankRuntime& rt = ranks_[r];
    const auto& neighbors = rt.view->neighbor_ranks;
    while (!done.load() && !failed.load()) {
      const std::uint64_t mine = ceil_div(rt.pending.size(), cfg_.superstep_size);
      steps_needed[r] = mine;
      round_uncolored[r] = rt.pending.size();
      barrier.arrive_and_wait();  // round plan published
      round_boundary[r] = 0;
      for (std::uint64_t k = 0; k < mine; ++k) {
        for (RankId q : neighbors) {
          std::vector<ColorMessage> msgs;
          if (cfg_.mode == CommMode::Synchronous) {
            // Superstep k sees exactly the neighbor's supersteps < k, as on
            // the deterministic backend; a fast neighbor's same-step
            // message must not leak in early.
            if (k == 0 || steps_needed[q] == 0) continue;
            const auto cap = static_cast<std::uint32_t>(
                std::min<std::uint64_t>(k - 1, steps_needed[q] - 1));
            msgs = concurrent_->take_through_tag(q, r, cap);
          } else {
            msgs = concurrent_->take_available(q, r);
          }
          for (const auto& m : msgs) apply(r, m);
        }
        round_boundary[r] += superstep_work(r, static_cast<std::uint32_t>(k));
        flush_outboxes(r, static_cast<std::uint32_t>(k), 0, k + 1 == mine);
      }
      barrier.arrive_and_wait();  // all round work sent
      for (RankId q : neighbors) {
        auto msgs = concurrent_->take_available(q, r);
        for (const auto& m : msgs) apply(r, m);
      }
      barrier.arrive_and_wait();  // round fully delivered
      std::uint64_t conflicts = 0;
      auto losers = detect_rank(r, conflicts);
      round_conflicts[r] = conflicts;
      clear_losers(r, losers);
      rt.pending.clear();
      rt.cursor = 0;
      for (std::uint32_t i : rt.visit)
        if (rt.color[i] == kUncolored) rt.pending.push_back(i);
      barrier.arrive_and_wait();  // resolution visible
      if (r == 0) {
        RoundStats stats;
        std::uint64_t max_steps = 0;
        for (RankId q = 0; q < p; ++q) {
          stats.conflicts += round_conflicts[q];
          stats.boundary_colored += round_boundary[q];
          stats.uncolored_at_start += round_uncolored[q];
          max_steps = std::max(max_steps, steps_needed[q]);
        }
        stats.supersteps = max_steps;
        tick_ += max_steps;
        metrics_.supersteps += max_steps;
        metrics_.conflicts += stats.conflicts;
        metrics_.per_round.push_back(stats);
        ++rounds;
        ++round_;
        concurrent_->reset_round();
        if (uncolored_total() == 0) done.store(true);
        else if (rounds >= cfg_.max_rounds) failed.store(true);
      }
      barrier.arrive_and_wait();  // round accounting settled
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(p);
  for (RankId r = 0; r < p; ++r) threads.emplace_back(worker, r);
  for (auto& t : threads) t.join();
  if (failed.load())
    throw ConvergenceError("protocol: round cap exceeded (threaded)");
  metrics_.rounds = rounds;
  return finish();
}

/// Runs the full speculative coloring protocol.
inline ProtocolResult run_protocol(const Graph& g, const std::vector<RankView>& views,
                                   const ProtocolConfig& cfg) {
  ProtocolEngine engine(g, views, cfg);
  return engine.run();
}

inline ProtocolResult run_protocol(const Graph& g, const Partition& part,
                                   const ProtocolConfig& cfg) {
  auto views = build_rank_views(g, part);
  return run_protocol(g, views, cfg);
}

}  // namespace distcolor
