#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "shpt/ideal.hpp"
#include "shpt/system.hpp"

namespace shpt {

enum class CorruptionOp {
  clear_edge,
  scramble_edge,
  delete_node,
  add_spurious_patricia,
  add_spurious_msd,
  move_key_to_wrong_label,
  misplace_node,
  corrupt_key2_slot,
  corrupt_r,
  inject_stray_message,
};

const char* corruption_op_name(CorruptionOp op);
std::optional<CorruptionOp> corruption_op_from_name(const std::string& name);

/// A replayable fault-injection recipe. Ops are applied in order, each
/// `count` times, under the script's own seed. Key values are never removed
/// and never duplicated.
struct CorruptionScript {
  std::uint64_t seed = 0;
  std::vector<std::pair<CorruptionOp, int>> ops;
  bool genesis = false;  // start from bare keys scattered at random peers

  /// Named intensity presets: none, low, medium, high, strip, genesis.
  static CorruptionScript level(const std::string& name, std::uint64_t seed);
};

/// Places a correct trie for `keys` into a fresh system (nodes at their
/// responsible peers, edges, msd nodes and a valid key2 matching), used by
/// tests and as the base the corruption script mutates.
void materialize_ideal(SystemState& s, const IdealHpt& ideal, const std::set<BitLabel>& keys);

/// Ideal trie, then scripted damage. Counters start clean; d_bits is set
/// from the key set. Throws if the script somehow broke key preservation.
SystemState generate_initial_state(const std::set<BitLabel>& keys, const CorruptionScript& script,
                                   std::size_t num_peers, std::uint64_t system_seed);

}  // namespace shpt
