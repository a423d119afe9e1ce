#pragma once

#include <vector>

#include "shpt/system.hpp"

namespace shpt::protocol {

/// One maintenance step of a peer: integrate loose keys, pick the next
/// stored node round-robin, migrate it if misplaced, then run the repair
/// checks and linearization on it.
void timeout(SystemState& s, std::size_t peer_idx);

/// Delivers one message to the node it addresses; messages whose target is
/// not stored at this peer are dropped.
void handle_message(SystemState& s, std::size_t peer_idx, const Message& m);

// Individual repair steps, exposed for tests. Each returns false when the
// node was deleted (or reinserted elsewhere) and the remaining steps of this
// timeout must not run.
bool check_node_info(SystemState& s, std::size_t peer_idx, const BitLabel& label);
bool check_parent_edge_info(SystemState& s, std::size_t peer_idx, const BitLabel& label);
bool check_child_edge_info(SystemState& s, std::size_t peer_idx, const BitLabel& label);
bool check_validity(SystemState& s, std::size_t peer_idx, const BitLabel& label);
bool check_key2_info(SystemState& s, std::size_t peer_idx, const BitLabel& label);
void linearize_timeout(SystemState& s, std::size_t peer_idx, const BitLabel& label);

/// Presentation handler: v is told that a Patricia node labeled `presented`
/// exists. Keeps edges to the closest labels, delegates the rest.
void linearize(SystemState& s, HptNode& v, const BitLabel& presented);

/// Edge initialization of a freshly constructed node from a set of known
/// labels: shorter ones become the parent, longer ones children. Runs before
/// the node is inserted, so it never delegates.
void multi_linearize(HptNode& fresh, const std::vector<BitLabel>& targets);

}  // namespace shpt::protocol
