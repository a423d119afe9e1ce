#include "shpt/msd.hpp"

#include <bit>
#include <stdexcept>

namespace shpt {

int msd_index(std::uint64_t a, std::uint64_t b) {
  if (a == b) throw std::invalid_argument("msd_index: values are equal");
  return std::bit_width(a ^ b) - 1;
}

std::optional<BitLabel> msd_label(const BitLabel& shorter, const BitLabel& longer) {
  if (!shorter.is_proper_prefix_of(longer))
    throw std::invalid_argument("msd_label: not a proper prefix pair");
  auto lu = static_cast<std::uint64_t>(shorter.size());
  auto lv = static_cast<std::uint64_t>(longer.size());
  int j = msd_index(lu, lv);
  // Keep the bits of lv at position j and above; everything below is zero.
  std::uint64_t len = lv & ~((1ull << j) - 1);
  if (len == lu || len == lv) return std::nullopt;
  return longer.prefix(static_cast<int>(len));
}

bool msd_missing(const BitLabel& parent_label, const BitLabel& child_label) {
  return msd_label(parent_label, child_label).has_value();
}

BitLabel edge_between(const BitLabel& parent_label, const BitLabel& child_label) {
  if (!parent_label.is_proper_prefix_of(child_label))
    throw std::invalid_argument("edge_between: not a proper prefix pair");
  return child_label.suffix_from(parent_label.size());
}

}  // namespace shpt
