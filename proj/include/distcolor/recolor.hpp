#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "distcolor/coloring.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/mailbox.hpp"
#include "distcolor/metrics.hpp"
#include "distcolor/partition.hpp"
#include "distcolor/protocol.hpp"
#include "distcolor/rng.hpp"
#include "distcolor/selection.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

enum class PermutationKind { Reverse, NonIncreasing, NonDecreasing, Random };

inline const char* to_string(PermutationKind k) {
  switch (k) {
    case PermutationKind::Reverse: return "rv";
    case PermutationKind::NonIncreasing: return "ni";
    case PermutationKind::NonDecreasing: return "nd";
    case PermutationKind::Random: return "rand";
  }
  return "?";
}

/// A realized visiting order over the color classes 1..num_colors of an
/// existing coloring.
struct ColorClassPermutation {
  PermutationKind kind = PermutationKind::Reverse;
  std::vector<Color> order;  // order[t-1] = class recolored at step t

  Color num_steps() const { return static_cast<Color>(order.size()); }

  /// step_of[c] = 1-based step at which class c is recolored.
  std::vector<std::uint32_t> step_index() const {
    std::vector<std::uint32_t> pos(order.size() + 1, 0);
    for (std::uint32_t t = 0; t < order.size(); ++t) pos[order[t]] = t + 1;
    return pos;
  }
};

/// Builds the class permutation from global class sizes (`sizes[c]` for
/// c in 1..C; index 0 is ignored). NI and ND break size ties by ascending
/// color id; Random is a Fisher-Yates shuffle of 1..C.
inline ColorClassPermutation build_class_permutation(
    std::span<const std::uint64_t> sizes, PermutationKind kind, SplitRng rng) {
  if (sizes.empty())
    throw ValidationError("class permutation: missing size entries");
  const Color num_colors = static_cast<Color>(sizes.size() - 1);
  ColorClassPermutation perm;
  perm.kind = kind;
  perm.order.resize(num_colors);
  std::iota(perm.order.begin(), perm.order.end(), 1);
  switch (kind) {
    case PermutationKind::Reverse:
      std::reverse(perm.order.begin(), perm.order.end());
      break;
    case PermutationKind::NonIncreasing:
      std::stable_sort(perm.order.begin(), perm.order.end(),
                       [&](Color a, Color b) {
                         if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
                         return a < b;
                       });
      break;
    case PermutationKind::NonDecreasing:
      std::stable_sort(perm.order.begin(), perm.order.end(),
                       [&](Color a, Color b) {
                         if (sizes[a] != sizes[b]) return sizes[a] < sizes[b];
                         return a < b;
                       });
      break;
    case PermutationKind::Random:
      for (Color i = num_colors; i > 1; --i)
        std::swap(perm.order[i - 1], perm.order[static_cast<Color>(rng.below(i))]);
      break;
  }
  return perm;
}

/// When to inject a Random permutation into an iteration schedule.
enum class InjectionRule { None, EveryX, PowersOfTwo };

struct PermutationSchedule {
  PermutationKind base = PermutationKind::NonDecreasing;
  InjectionRule injection = InjectionRule::None;
  std::uint32_t every_x = 1;   // EveryX period, >= 1
  std::uint32_t iterations = 1;

  void validate() const {
    if (injection == InjectionRule::EveryX && every_x < 1)
      throw ValidationError("schedule: every-x period must be >= 1");
  }

  /// Iteration indices are 1-based; powers-of-two fires at 2, 4, 8, ...
  bool random_fires(std::uint32_t iteration) const {
    switch (injection) {
      case InjectionRule::None: return false;
      case InjectionRule::EveryX: return iteration % every_x == 0;
      case InjectionRule::PowersOfTwo:
        return iteration >= 2 && (iteration & (iteration - 1)) == 0;
    }
    return false;
  }
};

/// Deferred-communication schedule for one recoloring iteration. For each
/// directed channel the sender sorts its relevant boundary vertices into
/// two buffers: vertices some receiver-side neighbor is colored after get
/// a deadline (one step before the earliest such neighbor's step) and the
/// whole deadline buffer flushes whenever the earliest pending deadline
/// comes due; vertices whose channel neighbors are all colored earlier go
/// out in a single end-of-iteration flush. No empty message ever fires.
/// Receivers learn the flush-step lists through one pre-communication
/// message per directed channel.
struct PiggybackPlan {
  struct Flush {
    std::uint32_t step = 0;            // fires at the end of this step
    std::vector<VertexId> vertices;    // never empty
  };
  struct Channel {
    RankId from = 0;
    RankId to = 0;
    std::vector<Flush> flushes;        // strictly increasing steps
    std::vector<VertexId> final_flush; // end-of-iteration payload
  };

  std::vector<Channel> channels;
  std::uint64_t precomm_messages = 0;

  const Channel* find(RankId from, RankId to) const {
    for (const auto& ch : channels)
      if (ch.from == from && ch.to == to) return &ch;
    return nullptr;
  }
};

/// Computes the piggyback plan for one iteration under `perm`, given the
/// coloring the iteration starts from. Purely local per channel: both ends
/// know the boundary vertices' current colors, hence their steps.
inline PiggybackPlan plan_piggyback(const std::vector<RankView>& views,
                                    const ColorClassPermutation& perm,
                                    const Coloring& coloring) {
  const auto step_of = perm.step_index();
  PiggybackPlan plan;
  for (const RankView& view : views) {
    for (RankId to : view.neighbor_ranks) {
      PiggybackPlan::Channel channel{view.rank, to, {}, {}};
      std::vector<std::pair<std::uint32_t, VertexId>> colored_at;  // (step, vertex)
      std::map<VertexId, std::uint32_t> deadline;                  // 0 = end flush
      for (std::uint32_t i = 0; i < view.owned_count(); ++i) {
        if (!view.is_boundary[i]) continue;
        const VertexId b = view.owned[i];
        const std::uint32_t my_step = step_of[coloring[b]];
        std::uint32_t earliest_later = 0;
        bool on_channel = false;
        for (std::uint32_t gi : view.ghost_neighbors(i)) {
          if (view.ghost_owner[gi] != to) continue;
          on_channel = true;
          const std::uint32_t their_step = step_of[coloring[view.ghosts[gi]]];
          if (their_step > my_step)
            earliest_later = earliest_later == 0
                                 ? their_step
                                 : std::min(earliest_later, their_step);
        }
        if (!on_channel) continue;
        colored_at.emplace_back(my_step, b);
        deadline[b] = earliest_later == 0 ? 0 : earliest_later - 1;
      }
      if (colored_at.empty()) continue;

      std::sort(colored_at.begin(), colored_at.end());
      std::vector<VertexId> pending;  // deadline-bound, not yet flushed
      std::size_t next = 0;
      for (std::uint32_t t = 1; t <= perm.num_steps(); ++t) {
        while (next < colored_at.size() && colored_at[next].first == t) {
          const VertexId b = colored_at[next].second;
          if (deadline[b] == 0) channel.final_flush.push_back(b);
          else pending.push_back(b);
          ++next;
        }
        bool due = false;
        for (VertexId b : pending)
          if (deadline[b] == t) { due = true; break; }
        if (due) {
          PiggybackPlan::Flush flush;
          flush.step = t;
          flush.vertices = pending;
          std::sort(flush.vertices.begin(), flush.vertices.end());
          channel.flushes.push_back(std::move(flush));
          pending.clear();
        }
      }
      if (!pending.empty())
        throw ValidationError("piggyback: deadline past final step");
      std::sort(channel.final_flush.begin(), channel.final_flush.end());
      plan.channels.push_back(std::move(channel));
      ++plan.precomm_messages;
    }
  }
  return plan;
}

struct RecolorResult {
  Coloring coloring;
  RunMetrics metrics;
};

namespace detail {

/// One synchronous recoloring iteration, shared by both backends. The step
/// loop is: deliver step t-1 messages, recolor the step-t class members in
/// ascending vertex id, flush per the communication mode. Conflict-freedom
/// and backend/rank-count invariance follow from class members of one step
/// being pairwise non-adjacent (adjacent vertices never share the input
/// color).
class RecolorEngine {
 public:
  RecolorEngine(const Graph& g, const std::vector<RankView>& views,
                const Coloring& input, const ColorClassPermutation& perm,
                const SelectionSpec& selection, bool piggyback,
                std::uint64_t seed, std::uint32_t attempt_tag)
      : g_(&g), views_(&views), input_(&input), perm_(&perm),
        piggyback_(piggyback), attempt_tag_(attempt_tag),
        step_of_(perm.step_index()) {
    if (!input.complete())
      throw ValidationError("recolor: input coloring is incomplete");
    if (!check_validity(g, input).empty())
      throw ValidationError("recolor: input coloring has conflicts");
    if (perm.num_steps() < input.num_colors())
      throw ValidationError("recolor: permutation does not cover all classes");
    const RankId p = static_cast<RankId>(views.size());
    if (piggyback_) {
      plan_.emplace(plan_piggyback(views, perm, input));
      metrics_.precomm_messages += plan_->precomm_messages;
    }
    ranks_.resize(p);
    for (RankId r = 0; r < p; ++r) {
      auto& rt = ranks_[r];
      rt.view = &views[r];
      const std::size_t k = rt.view->owned_count();
      rt.new_color.assign(k, kUncolored);
      rt.ghost_new.assign(rt.view->ghosts.size(), kUncolored);
      rt.ghost_step.resize(rt.view->ghosts.size());
      for (std::uint32_t gi = 0; gi < rt.view->ghosts.size(); ++gi)
        rt.ghost_step[gi] = step_of_[input[rt.view->ghosts[gi]]];
      rt.members.assign(perm.num_steps() + 1, {});
      for (std::uint32_t i = 0; i < k; ++i)
        rt.members[step_of_[input[rt.view->owned[i]]]].push_back(i);
      rt.chooser.emplace(selection, r, p, g.max_degree() + 1, seed);
      rt.outbox.resize(p);
    }
  }

  RecolorResult run(Backend backend) {
    if (backend == Backend::Threaded) run_threaded();
    else run_deterministic();
    return assemble();
  }

 private:
  struct Rank {
    const RankView* view = nullptr;
    std::vector<Color> new_color;
    std::vector<Color> ghost_new;
    std::vector<std::uint32_t> ghost_step;
    std::vector<std::vector<std::uint32_t>> members;  // owned idxs per step
    std::optional<ColorChooser> chooser;
    ForbiddenStamps forbidden;
    std::vector<std::vector<std::pair<VertexId, Color>>> outbox;
  };

  RankId num_ranks() const { return static_cast<RankId>(ranks_.size()); }

  void apply_payload(RankId r, const ColorMessage& msg) {
    auto& rt = ranks_[r];
    for (auto [v, c] : msg.payload)
      rt.ghost_new[rt.view->ghost_index.at(v)] = c;
  }

  void color_members(RankId r, std::uint32_t t) {
    auto& rt = ranks_[r];
    const RankView& view = *rt.view;
    for (std::uint32_t i : rt.members[t]) {
      rt.forbidden.begin_vertex();
      for (std::uint32_t j : view.owned_neighbors(i))
        if (rt.new_color[j] != kUncolored) rt.forbidden.mark(rt.new_color[j]);
      for (std::uint32_t gi : view.ghost_neighbors(i)) {
        if (rt.ghost_step[gi] < t && rt.ghost_new[gi] == kUncolored)
          throw ValidationError("recolor: earlier-step ghost color missing");
        if (rt.ghost_new[gi] != kUncolored) rt.forbidden.mark(rt.ghost_new[gi]);
      }
      const Color c = rt.chooser->pick(rt.forbidden, view.owned[i], attempt_tag_);
      rt.new_color[i] = c;
      rt.chooser->note_assigned(c);
      if (!piggyback_ && view.is_boundary[i])
        for (RankId q : view.peers(i))
          rt.outbox[q].emplace_back(view.owned[i], c);
    }
  }

  std::vector<std::pair<VertexId, Color>> flush_payload(
      const Rank& rt, const std::vector<VertexId>& vertices) const {
    std::vector<std::pair<VertexId, Color>> payload;
    payload.reserve(vertices.size());
    for (VertexId v : vertices) {
      const auto i = static_cast<std::uint32_t>(
          std::lower_bound(rt.view->owned.begin(), rt.view->owned.end(), v) -
          rt.view->owned.begin());
      payload.emplace_back(v, rt.new_color[i]);
    }
    return payload;
  }

  template <class SendFn>
  void send_step(RankId r, std::uint32_t t, SendFn&& send) {
    auto& rt = ranks_[r];
    if (piggyback_) {
      for (RankId q : rt.view->neighbor_ranks) {
        const auto* channel = plan_->find(r, q);
        if (channel == nullptr) continue;
        for (const auto& flush : channel->flushes) {
          if (flush.step != t) continue;
          send(q, ColorMessage{r, t, t + 1u, false, flush_payload(rt, flush.vertices)});
        }
      }
    } else {
      // Baseline: one message per directed neighbor channel per step,
      // empty when nothing relevant was recolored.
      for (RankId q : rt.view->neighbor_ranks) {
        send(q, ColorMessage{r, t, t + 1u, false, std::move(rt.outbox[q])});
        rt.outbox[q].clear();
      }
    }
  }

  template <class SendFn>
  void send_final(RankId r, std::uint32_t tag, SendFn&& send) {
    if (!piggyback_) return;
    auto& rt = ranks_[r];
    for (RankId q : rt.view->neighbor_ranks) {
      const auto* channel = plan_->find(r, q);
      if (channel == nullptr || channel->final_flush.empty()) continue;
      send(q, ColorMessage{r, tag, tag, true, flush_payload(rt, channel->final_flush)});
    }
  }

  void run_deterministic() {
    const RankId p = num_ranks();
    Mailbox mailbox(p);
    const std::uint32_t steps = perm_->num_steps();
    for (std::uint32_t t = 1; t <= steps; ++t) {
      for (RankId r = 0; r < p; ++r)
        mailbox.deliver_visible(r, t, [&](const ColorMessage& m) { apply_payload(r, m); });
      for (RankId r = 0; r < p; ++r) color_members(r, t);
      for (RankId r = 0; r < p; ++r)
        send_step(r, t, [&](RankId q, ColorMessage msg) {
          mailbox.send(r, q, std::move(msg));
        });
      ++metrics_.supersteps;
      ++metrics_.ticks;
    }
    for (RankId r = 0; r < p; ++r)
      send_final(r, steps + 1, [&](RankId q, ColorMessage msg) {
        mailbox.send(r, q, std::move(msg));
      });
    for (RankId r = 0; r < p; ++r)
      mailbox.drain(r, [&](const ColorMessage& m) { apply_payload(r, m); });
    mailbox.counters().flush_into(metrics_);
  }

  void run_threaded() {
    const RankId p = num_ranks();
    ConcurrentMailbox mailbox(p);
    RoundBarrier barrier(p);
    const std::uint32_t steps = perm_->num_steps();
    auto worker = [&](RankId r) {
      const auto& neighbors = ranks_[r].view->neighbor_ranks;
      auto take_all = [&] {
        for (RankId q : neighbors)
          for (const auto& m : mailbox.take_available(q, r)) apply_payload(r, m);
      };
      for (std::uint32_t t = 1; t <= steps; ++t) {
        take_all();  // step t-1 flushes, complete thanks to the barrier
        color_members(r, t);
        send_step(r, t, [&](RankId q, ColorMessage msg) {
          mailbox.send(r, q, std::move(msg));
        });
        barrier.arrive_and_wait();
      }
      send_final(r, steps + 1, [&](RankId q, ColorMessage msg) {
        mailbox.send(r, q, std::move(msg));
      });
      barrier.arrive_and_wait();
      take_all();
    };
    std::vector<std::thread> threads;
    threads.reserve(p);
    for (RankId r = 0; r < p; ++r) threads.emplace_back(worker, r);
    for (auto& t : threads) t.join();
    metrics_.supersteps += steps;
    metrics_.ticks += steps;
    mailbox.counters().flush_into(metrics_);
  }

  RecolorResult assemble() {
    RecolorResult result;
    result.coloring = Coloring(g_->num_vertices());
    for (const auto& rt : ranks_)
      for (std::uint32_t i = 0; i < rt.new_color.size(); ++i)
        result.coloring[rt.view->owned[i]] = rt.new_color[i];
    if (!check_validity(*g_, result.coloring).empty())
      throw ValidationError("recolor: produced an invalid coloring");
    metrics_.num_colors = result.coloring.num_colors();
    result.metrics = metrics_;
    return result;
  }

  const Graph* g_;
  const std::vector<RankView>* views_;
  const Coloring* input_;
  const ColorClassPermutation* perm_;
  bool piggyback_;
  std::uint32_t attempt_tag_;
  std::vector<std::uint32_t> step_of_;
  std::optional<PiggybackPlan> plan_;
  std::vector<Rank> ranks_;
  RunMetrics metrics_;
};

}  // namespace detail

/// One synchronous recoloring iteration: proceeds in as many steps as the
/// input coloring has colors; at step t every rank recolors its members of
/// class perm.order[t-1] in ascending vertex id, forbidding only colors
/// assigned earlier in this iteration. Adjacent vertices never share a
/// step, so the result is conflict-free without any resolution round and
/// identical for every rank count and backend. With FirstFit selection the
/// number of colors never increases.
inline RecolorResult recolor_sync(const Graph& g,
                                  const std::vector<RankView>& views,
                                  const Coloring& input,
                                  const ColorClassPermutation& perm,
                                  const SelectionSpec& selection = {},
                                  bool piggyback = false,
                                  std::uint64_t seed = 1,
                                  Backend backend = Backend::Deterministic,
                                  std::uint32_t attempt_tag = 0) {
  detail::RecolorEngine engine(g, views, input, perm, selection, piggyback,
                               seed, attempt_tag);
  return engine.run(backend);
}

/// Repeated synchronous recoloring under a permutation schedule. Iteration
/// i (1-based) uses Random when the injection rule fires, otherwise the
/// base kind. NI/ND class sizes are global; with p > 1 the size exchange
/// is modeled as a gather plus broadcast and counted as traffic. The
/// trajectory holds the color count after 0, 1, ..., N iterations.
inline RecolorResult recolor_iterations(const Graph& g,
                                        const std::vector<RankView>& views,
                                        const Coloring& input,
                                        const PermutationSchedule& schedule,
                                        const SelectionSpec& selection = {},
                                        bool piggyback = false,
                                        std::uint64_t seed = 1,
                                        Backend backend = Backend::Deterministic) {
  schedule.validate();
  const RankId p = static_cast<RankId>(views.size());
  RecolorResult result;
  result.coloring = input;
  result.metrics.trajectory.push_back(input.num_colors());
  SplitRng perm_rng = SplitRng(seed).stream(0x9e23);

  for (std::uint32_t i = 1; i <= schedule.iterations; ++i) {
    const PermutationKind kind =
        schedule.random_fires(i) ? PermutationKind::Random : schedule.base;
    const auto sizes = result.coloring.class_sizes();
    if (p > 1 && (kind == PermutationKind::NonIncreasing ||
                  kind == PermutationKind::NonDecreasing)) {
      const std::uint64_t n_msgs = 2ULL * (p - 1);
      const std::uint64_t entries = sizes.empty() ? 0 : sizes.size() - 1;
      result.metrics.messages += n_msgs;
      result.metrics.nonempty_messages += n_msgs;
      result.metrics.pairs += n_msgs * entries;
      result.metrics.bytes += n_msgs * entries * kPairBytes;
    }
    const auto perm = build_class_permutation(sizes, kind, perm_rng.stream(i));
    RecolorResult pass = recolor_sync(g, views, result.coloring, perm,
                                      selection, piggyback, seed, backend,
                                      /*attempt_tag=*/i);
    result.coloring = std::move(pass.coloring);
    result.metrics.add_traffic(pass.metrics);
    result.metrics.trajectory.push_back(result.coloring.num_colors());
  }
  result.metrics.num_colors = result.coloring.num_colors();
  return result;
}

/// Asynchronous recoloring: each rank independently orders its owned
/// vertices by (permutation step of current color, ascending id) and the
/// speculative protocol runs afresh with that order, conflict-resolution
/// rounds included. Can use more colors than the synchronous procedure.
inline RecolorResult recolor_async(const Graph& g,
                                   const std::vector<RankView>& views,
                                   const Coloring& input,
                                   const ColorClassPermutation& perm,
                                   const ProtocolConfig& cfg) {
  if (!input.complete())
    throw ValidationError("recolor: input coloring is incomplete");
  if (perm.num_steps() < input.num_colors())
    throw ValidationError("recolor: permutation does not cover all classes");
  const auto step_of = perm.step_index();
  std::vector<std::vector<VertexId>> orders(views.size());
  for (std::size_t r = 0; r < views.size(); ++r) {
    orders[r] = views[r].owned;
    std::stable_sort(orders[r].begin(), orders[r].end(),
                     [&](VertexId a, VertexId b) {
                       return step_of[input[a]] < step_of[input[b]];
                     });
  }
  ProtocolEngine engine(g, views, cfg);
  engine.set_visit_orders(orders);
  ProtocolResult run = engine.run();
  return {std::move(run.coloring), std::move(run.metrics)};
}

}  // namespace distcolor
