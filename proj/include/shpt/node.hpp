#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "shpt/bit_label.hpp"

namespace shpt {

enum class NodeKind { patricia, msd };

/// One trie node record as stored in the DHT. Fields can be arbitrarily
/// inconsistent in corrupted states; the repair protocol restores the
/// invariants, so nothing here is enforced at construction.
struct HptNode {
  BitLabel label;                        // also the storage key
  NodeKind kind = NodeKind::patricia;
  std::optional<BitLabel> parent_edge;   // suffix s with parent . s = label
  std::optional<BitLabel> child0;        // extension starting with 0
  std::optional<BitLabel> child1;        // extension starting with 1
  std::optional<BitLabel> key;           // set iff label holds a key
  std::vector<BitLabel> key2;            // leaf references; root holds up to two
  std::optional<BitLabel> r;             // back-reference from a leaf

  bool is_root() const { return label.empty(); }
  bool is_msd() const { return kind == NodeKind::msd; }

  int children() const {
    return (child0.has_value() ? 1 : 0) + (child1.has_value() ? 1 : 0);
  }

  const std::optional<BitLabel>& child(int bit) const { return bit == 0 ? child0 : child1; }
  std::optional<BitLabel>& child(int bit) { return bit == 0 ? child0 : child1; }

  /// Inner node with two children, or the root: eligible to hold key2 values.
  bool is_key2_node() const {
    return kind == NodeKind::patricia && (children() == 2 || is_root());
  }
  bool is_leaf() const { return kind == NodeKind::patricia && children() == 0; }

  std::size_t key2_capacity() const { return is_root() ? 2 : 1; }
  bool key2_has_free_slot() const { return key2.size() < key2_capacity(); }
  bool key2_contains(const BitLabel& l) const {
    return std::find(key2.begin(), key2.end(), l) != key2.end();
  }
  void key2_erase(const BitLabel& l) {
    key2.erase(std::remove(key2.begin(), key2.end(), l), key2.end());
  }

  /// Label of the parent this node's edge points at, when the edge is a
  /// plausible suffix. Garbage edges yield nothing.
  std::optional<BitLabel> parent_label() const {
    if (!parent_edge || parent_edge->empty() || !parent_edge->is_suffix_of(label))
      return std::nullopt;
    return label.prefix(label.size() - parent_edge->size());
  }

  /// The single child edge of an msd node; nothing when it has zero or two.
  std::optional<BitLabel> msd_child_edge() const {
    if (children() != 1) return std::nullopt;
    return child0 ? child0 : child1;
  }

  friend bool operator==(const HptNode&, const HptNode&) = default;
};

}  // namespace shpt
