#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "distcolor/rng.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

enum class SelectionKind {
  FirstFit,          // smallest permissible color
  StaggeredFirstFit, // first-fit from a rank-dependent offset in an estimate
  LeastUsed,         // locally least used permissible color
  RandomX,           // uniform over the first X permissible colors
};

struct SelectionSpec {
  SelectionKind kind = SelectionKind::FirstFit;
  Color estimate = 0;    // StaggeredFirstFit; 0 = derive max_degree+1
  std::uint32_t x = 1;   // RandomX, >= 1

  void validate() const {
    if (kind == SelectionKind::RandomX && x < 1)
      throw ValidationError("selection: RandomX requires X >= 1");
  }

  static SelectionSpec first_fit() { return {}; }
  static SelectionSpec staggered(Color estimate) {
    return {SelectionKind::StaggeredFirstFit, estimate, 1};
  }
  static SelectionSpec least_used() { return {SelectionKind::LeastUsed, 0, 1}; }
  static SelectionSpec random_x(std::uint32_t x) {
    return {SelectionKind::RandomX, 0, x};
  }
};

inline std::string to_string(const SelectionSpec& s) {
  switch (s.kind) {
    case SelectionKind::FirstFit: return "ff";
    case SelectionKind::StaggeredFirstFit:
      return "sff" + std::to_string(s.estimate);
    case SelectionKind::LeastUsed: return "lu";
    case SelectionKind::RandomX: return "randx" + std::to_string(s.x);
  }
  return "?";
}

/// Stateful color selector for one coloring run on one rank. Tracks local
/// usage counts and the local palette high-water mark; RandomX draws come
/// from a stream keyed by (seed, vertex, attempt) so results are independent
/// of visit order and identical across execution backends.
class ColorChooser {
 public:
  ColorChooser(SelectionSpec spec, RankId rank, RankId num_ranks,
               Color estimate_hint, std::uint64_t seed)
      : spec_(spec), rng_(SplitRng(seed).stream(0x5e1ec7)) {
    spec_.validate();
    if (spec_.kind == SelectionKind::StaggeredFirstFit) {
      estimate_ = spec_.estimate != 0 ? spec_.estimate : estimate_hint;
      if (estimate_ < 1) estimate_ = 1;
      const Color slice = (estimate_ + num_ranks - 1) / num_ranks;
      start_ = 1 + rank * slice;
      if (start_ > estimate_) start_ = 1;
    }
  }

  /// Picks a permissible color. `forbidden` is a predicate over colors;
  /// a permissible color always exists since palettes are unbounded.
  template <class Forbidden>
  Color pick(Forbidden&& forbidden, VertexId vertex, std::uint32_t attempt) {
    switch (spec_.kind) {
      case SelectionKind::FirstFit:
        return first_free(forbidden, 1);

      case SelectionKind::StaggeredFirstFit: {
        for (Color c = start_; c <= estimate_; ++c)
          if (!forbidden(c)) return c;
        for (Color c = 1; c < start_; ++c)
          if (!forbidden(c)) return c;
        return first_free(forbidden, estimate_ + 1);
      }

      case SelectionKind::LeastUsed: {
        // Least used color of the local palette so far, ties to the
        // smaller color; a fresh color only when the whole palette is
        // forbidden.
        Color best = 0;
        for (Color c = 1; c <= num_colors_; ++c) {
          if (forbidden(c)) continue;
          if (best == 0 || usage(c) < usage(best)) best = c;
        }
        if (best == 0) best = first_free(forbidden, num_colors_ + 1);
        return best;
      }

      case SelectionKind::RandomX: {
        Color nth = 0;
        std::uint32_t found = 0;
        std::uint64_t idx =
            rng_.stream(vertex).stream(attempt).below(spec_.x);
        for (Color c = 1; found <= idx; ++c) {
          if (!forbidden(c)) {
            nth = c;
            ++found;
          }
        }
        return nth;
      }
    }
    throw ValidationError("selection: unknown kind");
  }

  /// Records an assignment so LeastUsed counts and the palette mark stay
  /// current.
  void note_assigned(Color c) {
    if (c >= usage_.size()) usage_.resize(c + 1, 0);
    ++usage_[c];
    if (c > num_colors_) num_colors_ = c;
  }

  /// Reverts a tentative assignment discarded by conflict resolution.
  void note_cleared(Color c) {
    if (c < usage_.size() && usage_[c] > 0) --usage_[c];
  }

  Color num_colors() const { return num_colors_; }

 private:
  template <class Forbidden>
  static Color first_free(Forbidden&& forbidden, Color from) {
    Color c = from;
    while (forbidden(c)) ++c;
    return c;
  }

  std::uint64_t usage(Color c) const {
    return c < usage_.size() ? usage_[c] : 0;
  }

  SelectionSpec spec_;
  SplitRng rng_;
  Color estimate_ = 0;
  Color start_ = 1;
  Color num_colors_ = 0;
  std::vector<std::uint64_t> usage_;
};

/// Single-shot selection over an explicit forbidden set, for callers that
/// do not run a full coloring (and for direct testing of the strategies).
inline Color pick_color(const std::set<Color>& forbidden, const SelectionSpec& spec,
                        const std::unordered_map<Color, std::uint64_t>& usage,
                        Color num_colors, std::uint64_t seed,
                        RankId rank = 0, RankId num_ranks = 1,
                        VertexId vertex = 0, std::uint32_t attempt = 0) {
  ColorChooser chooser(spec, rank, num_ranks, /*estimate_hint=*/num_colors + 1, seed);
  for (Color c = 1; c <= num_colors; ++c)
    for (std::uint64_t i = usage.contains(c) ? usage.at(c) : 0; i > 0; --i)
      chooser.note_assigned(c);
  return chooser.pick([&](Color c) { return forbidden.contains(c); }, vertex, attempt);
}

}  // namespace distcolor
