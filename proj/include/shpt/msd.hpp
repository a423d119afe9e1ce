#pragma once

#include <cstdint>
#include <optional>

#include "shpt/bit_label.hpp"

namespace shpt {

/// Position of the most significant bit at which a and b differ
/// (equal-width, zero-padded binary expansions). Throws when a == b.
int msd_index(std::uint64_t a, std::uint64_t b);

/// The auxiliary node label between a shorter and a longer label: the prefix
/// of `longer` whose length keeps the top bits of |longer| down to the msd of
/// the two lengths and clears the rest. Empty when that length collides with
/// either endpoint (no node fits there). Requires shorter to be a proper
/// prefix of longer.
std::optional<BitLabel> msd_label(const BitLabel& shorter, const BitLabel& longer);

/// Whether a distinct auxiliary label fits strictly between parent and child.
/// Existence in the DHT is the caller's business.
bool msd_missing(const BitLabel& parent_label, const BitLabel& child_label);

/// The bit string x with parent_label . x = child_label.
BitLabel edge_between(const BitLabel& parent_label, const BitLabel& child_label);

}  // namespace shpt
