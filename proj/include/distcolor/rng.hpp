#pragma once

#include <cstdint>

namespace distcolor {

namespace detail {
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

/// Seedable, splittable counter-based generator (splitmix64 core).
///
/// Streams derived via `stream(key)` are statistically independent of the
/// parent and of sibling streams, so a draw for one vertex never perturbs
/// the draws of another regardless of visit order. All outputs are exact
/// functions of (seed, stream keys, draw index) and are identical across
/// platforms.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed)
      : state_(detail::mix64(seed + 0x9e3779b97f4a7c15ULL)) {}

  /// Derives an independent child stream for `key`.
  [[nodiscard]] SplitRng stream(std::uint64_t key) const {
    SplitRng r(0);
    r.state_ = detail::mix64(state_ ^ detail::mix64(key * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL));
    return r;
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  /// Uniform draw in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace distcolor
