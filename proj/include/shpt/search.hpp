#pragma once

#include <optional>

#include "shpt/system.hpp"

namespace shpt {

/// MSB-first binary search over prefix lengths of x. Returns the deepest
/// Patricia node whose label is a proper prefix of x, in a legal state; in
/// corrupted states some proper-prefix Patricia node or nothing. Never
/// returns an msd node. At most floor(log2 max(|x|,2)) + 2 reads on a legal
/// trie.
std::optional<HptNode> binary_prefix_search(SystemState& s, const BitLabel& x);

/// Longest prefix match: a key maximizing |lcp(x, key)| over the stored key
/// set, on a legal trie. Nothing when the system holds no reachable keys.
std::optional<BitLabel> prefix_search(SystemState& s, const BitLabel& x);

enum class KeyOpVerdict { applied, noop };

/// Seeds a Patricia node for a fresh key; the repair protocol integrates it
/// over the following rounds.
KeyOpVerdict insert_key(SystemState& s, const BitLabel& k);

/// Clears the key field on the node labeled k (constant accesses); the
/// protocol then removes whatever became unnecessary.
KeyOpVerdict delete_key(SystemState& s, const BitLabel& k);

}  // namespace shpt
