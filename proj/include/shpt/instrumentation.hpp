#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string_view>

#include "shpt/system.hpp"

namespace shpt {

/// Observable counterparts of the repair phases' potential functions,
/// computed from a global snapshot by pure functions. All of them sit at
/// zero exactly when the corresponding deficiency class is gone; they may
/// move non-monotonically while stray messages circulate.
struct PhaseCounters {
  std::uint64_t misstored_keys = 0;       // keys lacking a correctly labeled node
  std::uint64_t malformed_fields = 0;     // locally refutable field values
  std::uint64_t empty_subtree_depth = 0;  // deepest node with no key below it
  std::uint64_t unnecessary_nodes = 0;    // keyless nodes at no keyed-pair fork
  std::uint64_t locally_unnecessary = 0;  // keyless nodes missing a child edge
  std::uint64_t parentless = 0;           // nodes without an existing parent
  std::uint64_t incorrect_msd = 0;
  std::uint64_t missing_msd = 0;
  std::uint64_t unmatched_key2 = 0;       // free non-root slots + duplicated values
  std::uint64_t unmatched_r = 0;          // leaves without a matching back-reference

  static constexpr std::size_t kCount = 10;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "misstored_keys",  "malformed_fields", "empty_subtree_depth", "unnecessary_nodes",
      "locally_unnecessary", "parentless",   "incorrect_msd",       "missing_msd",
      "unmatched_key2",  "unmatched_r"};

  std::array<std::uint64_t, kCount> values() const {
    return {misstored_keys,      malformed_fields, empty_subtree_depth, unnecessary_nodes,
            locally_unnecessary, parentless,       incorrect_msd,       missing_msd,
            unmatched_key2,      unmatched_r};
  }
  bool all_zero() const {
    for (auto v : values())
      if (v != 0) return false;
    return true;
  }
};

PhaseCounters compute_phase_counters(const SystemState& s, const std::set<BitLabel>& keys);

}  // namespace shpt
