#pragma once

#include <cstdint>
#include <vector>

#include "shpt/bit_label.hpp"

namespace shpt {

/// Tiny deterministic generator (splitmix64 stream). Hand-rolled so traces
/// replay bit-identically regardless of standard library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return splitmix64(state_);
  }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  int range(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(int num, int den) { return below(static_cast<std::uint64_t>(den)) < static_cast<std::uint64_t>(num); }

  BitLabel label(int min_len, int max_len) {
    int len = range(min_len, max_len);
    std::uint64_t bits = len == 0 ? 0 : (next() & (len >= 64 ? ~0ull : ((1ull << len) - 1)));
    return BitLabel::from_bits(bits, len);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  Rng fork(std::uint64_t salt) { return Rng(splitmix64(state_ ^ salt)); }

 private:
  std::uint64_t state_;
};

}  // namespace shpt
