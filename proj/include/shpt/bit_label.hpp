#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shpt {

/// A binary string of up to 64 bits. Value type: node labels, edges and keys
/// are all bit labels. The empty label is the root label.
///
/// Bits are stored right-aligned in a word: the first (leftmost) bit of the
/// label is the most significant of the `size()` low bits. Lexicographic
/// order; a proper prefix sorts before its extensions.
class BitLabel {
 public:
  static constexpr int kMaxBits = 64;

  constexpr BitLabel() = default;

  static constexpr BitLabel from_bits(std::uint64_t bits, int len) {
    if (len < 0 || len > kMaxBits) throw std::length_error("BitLabel: bad length");
    if (len < kMaxBits && (bits >> len) != 0)
      throw std::invalid_argument("BitLabel: stray bits above length");
    return BitLabel(bits, len);
  }

  static std::optional<BitLabel> parse(std::string_view text) {
    if (text.size() > kMaxBits) return std::nullopt;
    std::uint64_t bits = 0;
    for (char c : text) {
      if (c != '0' && c != '1') return std::nullopt;
      bits = (bits << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return BitLabel(bits, static_cast<int>(text.size()));
  }

  constexpr int size() const { return len_; }
  constexpr bool empty() const { return len_ == 0; }
  constexpr std::uint64_t packed_bits() const { return bits_; }

  /// Bit at position i, counted from the front (0-based).
  constexpr int bit(int i) const {
    if (i < 0 || i >= len_) throw std::out_of_range("BitLabel::bit");
    return static_cast<int>((bits_ >> (len_ - 1 - i)) & 1u);
  }

  constexpr BitLabel prefix(int n) const {
    if (n < 0 || n > len_) throw std::out_of_range("BitLabel::prefix");
    return BitLabel(n == 0 ? 0 : bits_ >> (len_ - n), n);
  }

  /// Drops the first n bits.
  constexpr BitLabel suffix_from(int n) const {
    if (n < 0 || n > len_) throw std::out_of_range("BitLabel::suffix_from");
    int m = len_ - n;
    return BitLabel(m == 0 ? 0 : (bits_ & mask(m)), m);
  }

  constexpr BitLabel append(int b) const {
    if (len_ >= kMaxBits) throw std::length_error("BitLabel::append: full");
    return BitLabel((bits_ << 1) | static_cast<std::uint64_t>(b & 1), len_ + 1);
  }

  friend constexpr BitLabel concat(const BitLabel& a, const BitLabel& b) {
    if (a.len_ + b.len_ > kMaxBits) throw std::length_error("BitLabel: concat overflow");
    if (b.len_ == 0) return a;
    return BitLabel((a.bits_ << b.len_) | b.bits_, a.len_ + b.len_);
  }

  constexpr bool is_prefix_of(const BitLabel& o) const {
    return len_ <= o.len_ && o.prefix(len_).bits_ == bits_;
  }
  constexpr bool is_proper_prefix_of(const BitLabel& o) const {
    return len_ < o.len_ && is_prefix_of(o);
  }
  constexpr bool is_suffix_of(const BitLabel& o) const {
    return len_ <= o.len_ && (o.bits_ & mask(len_)) == bits_;
  }

  friend constexpr BitLabel lcp(const BitLabel& a, const BitLabel& b) {
    std::uint64_t xa = a.left_aligned();
    std::uint64_t xb = b.left_aligned();
    int common = std::min(a.len_, b.len_);
    std::uint64_t diff = xa ^ xb;
    if (diff != 0) common = std::min(common, std::countl_zero(diff));
    return a.prefix(common);
  }

  friend constexpr bool operator==(const BitLabel& a, const BitLabel& b) = default;
  friend constexpr std::strong_ordering operator<=>(const BitLabel& a, const BitLabel& b) {
    std::uint64_t xa = a.left_aligned();
    std::uint64_t xb = b.left_aligned();
    if (xa != xb) return xa <=> xb;
    return a.len_ <=> b.len_;
  }

  std::string str() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(len_));
    for (int i = 0; i < len_; ++i) s.push_back(static_cast<char>('0' + bit(i)));
    return s;
  }

 private:
  constexpr BitLabel(std::uint64_t bits, int len) : bits_(bits), len_(len) {}

  static constexpr std::uint64_t mask(int n) {
    return n >= 64 ? ~0ull : ((1ull << n) - 1);
  }
  constexpr std::uint64_t left_aligned() const {
    return len_ == 0 ? 0 : bits_ << (kMaxBits - len_);
  }

  std::uint64_t bits_ = 0;
  int len_ = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seedable hash of a label, interpreted as a ring position in [0, 2^64).
/// Collision-freedom over the labels in play is asserted at runtime by the
/// DHT layer.
inline std::uint64_t ring_hash(const BitLabel& l, std::uint64_t seed) {
  return splitmix64(splitmix64(seed ^ l.packed_bits()) ^
                    (0x51ed2701ab0517c5ull * static_cast<std::uint64_t>(l.size() + 1)));
}

}  // namespace shpt
