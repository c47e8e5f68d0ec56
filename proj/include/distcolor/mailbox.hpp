#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <utility>
#include <vector>

#include "distcolor/metrics.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

// Wire size of one (vertex, color) pair.
inline constexpr std::uint64_t kPairBytes = 8;

struct ColorMessage {
  RankId from = 0;
  std::uint32_t tag = 0;          // superstep or recolor step index
  std::uint64_t visible_at = 0;   // deterministic backend: earliest tick
  bool last_in_round = false;
  std::vector<std::pair<VertexId, Color>> payload;
};

struct TrafficCounters {
  std::uint64_t messages = 0;
  std::uint64_t nonempty = 0;
  std::uint64_t pairs = 0;
  std::uint64_t bytes = 0;

  void record(std::size_t payload_size) {
    ++messages;
    if (payload_size > 0) {
      ++nonempty;
      pairs += payload_size;
      bytes += payload_size * kPairBytes;
    }
  }

  void flush_into(RunMetrics& m) const {
    m.messages += messages;
    m.nonempty_messages += nonempty;
    m.pairs += pairs;
    m.bytes += bytes;
  }
};

/// FIFO channels for every (sender, receiver) pair plus traffic counters.
/// Data-plane messages only; barrier/round-control signalling is not a
/// message and is never counted.
class Mailbox {
 public:
  explicit Mailbox(RankId num_ranks) : p_(num_ranks), channels_(std::size_t(num_ranks) * num_ranks) {}

  void send(RankId from, RankId to, ColorMessage msg) {
    counters_.record(msg.payload.size());
    channels_[index(from, to)].push_back(std::move(msg));
  }

  /// Delivers every queued message for `to` visible at `tick`, in sender
  /// order then FIFO order. Each message is delivered exactly once.
  template <class F>
  void deliver_visible(RankId to, std::uint64_t tick, F&& handle) {
    for (RankId from = 0; from < p_; ++from) {
      auto& q = channels_[index(from, to)];
      while (!q.empty() && q.front().visible_at <= tick) {
        handle(q.front());
        q.pop_front();
      }
    }
  }

  template <class F>
  void drain(RankId to, F&& handle) {
    deliver_visible(to, UINT64_MAX, handle);
  }

  bool all_empty() const {
    for (const auto& q : channels_) if (!q.empty()) return false;
    return true;
  }

  const TrafficCounters& counters() const { return counters_; }

 private:
  std::size_t index(RankId from, RankId to) const {
    return std::size_t(from) * p_ + to;
  }

  RankId p_;
  std::vector<std::deque<ColorMessage>> channels_;
  TrafficCounters counters_;
};

/// Thread-safe channel grid for the threaded backend. Receivers either take
/// all messages up to a tag (synchronous discipline, blocking until the
/// sender has produced that tag or finished its round) or take whatever has
/// arrived (asynchronous discipline).
class ConcurrentMailbox {
 public:
  explicit ConcurrentMailbox(RankId num_ranks)
      : p_(num_ranks), channels_(std::size_t(num_ranks) * num_ranks) {}

  void send(RankId from, RankId to, ColorMessage msg) {
    auto& ch = channels_[index(from, to)];
    {
      std::lock_guard lock(ch.mutex);
      counters_lock_.lock();
      counters_.record(msg.payload.size());
      counters_lock_.unlock();
      if (msg.last_in_round) ch.done_tag = msg.tag;
      ch.queue.push_back(std::move(msg));
    }
    ch.cv.notify_one();
  }

  /// Blocks until all messages with tag <= `tag` from `from` are available
  /// (or the sender marked its round done below `tag`), then moves them out.
  std::vector<ColorMessage> take_through_tag(RankId from, RankId to, std::uint32_t tag) {
    auto& ch = channels_[index(from, to)];
    std::unique_lock lock(ch.mutex);
    ch.cv.wait(lock, [&] {
      if (ch.done_tag != kNoTag && ch.done_tag <= tag) return true;
      // Sender emits consecutive tags, so the queue back tells progress.
      return !ch.queue.empty() && ch.queue.back().tag >= tag;
    });
    return take_prefix_locked(ch, tag);
  }

  std::vector<ColorMessage> take_available(RankId from, RankId to) {
    auto& ch = channels_[index(from, to)];
    std::lock_guard lock(ch.mutex);
    return take_prefix_locked(ch, UINT32_MAX);
  }

  /// Clears per-round sender progress marks. Call between rounds, after a
  /// barrier, when every queue is empty.
  void reset_round() {
    for (auto& ch : channels_) {
      std::lock_guard lock(ch.mutex);
      ch.done_tag = kNoTag;
    }
  }

  const TrafficCounters& counters() const { return counters_; }

 private:
  static constexpr std::uint32_t kNoTag = UINT32_MAX;

  struct Channel {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<ColorMessage> queue;
    std::uint32_t done_tag = kNoTag;
  };

  static std::vector<ColorMessage> take_prefix_locked(Channel& ch, std::uint32_t tag) {
    std::vector<ColorMessage> out;
    while (!ch.queue.empty() && ch.queue.front().tag <= tag) {
      out.push_back(std::move(ch.queue.front()));
      ch.queue.pop_front();
    }
    return out;
  }

  std::size_t index(RankId from, RankId to) const {
    return std::size_t(from) * p_ + to;
  }

  RankId p_;
  std::vector<Channel> channels_;
  std::mutex counters_lock_;
  TrafficCounters counters_;
};

}  // namespace distcolor
