#pragma once

#include <map>
#include <set>
#include <vector>

#include "shpt/bit_label.hpp"
#include "shpt/node.hpp"

namespace shpt {

/// The reference model of a correct trie for a key set, built independently
/// of the protocol. Tests and the legality checker compare against it.
struct IdealHpt {
  std::set<BitLabel> patricia;                      // keys + pairwise lcps + root
  std::set<BitLabel> msd;                           // one per closest pair, when it fits
  std::map<BitLabel, BitLabel> parent_of;           // patricia child -> closest ancestor
  std::map<BitLabel, std::vector<BitLabel>> children_of;  // inverse, <= 2 entries
  std::map<BitLabel, BitLabel> msd_between;         // child patricia label -> msd label
  std::map<BitLabel, std::vector<BitLabel>> key2_assignment;  // key2 node -> leaves
  std::map<BitLabel, BitLabel> r_of;                // leaf -> owning key2 node

  std::vector<BitLabel> leaves() const;
  std::vector<BitLabel> key2_nodes() const;
  bool is_leaf(const BitLabel& l) const { return children_of.count(l) == 0 || children_of.at(l).empty(); }
};

/// Builds the unique legal structure plus one valid key2 matching (each leaf
/// assigned to the deepest eligible node with a free slot, longest leaves
/// first, lexicographic tiebreak). Throws on an empty key set.
IdealHpt build_ideal_hpt(const std::set<BitLabel>& keys);

}  // namespace shpt
