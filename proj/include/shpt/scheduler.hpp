#pragma once

#include <cstdint>

#include "shpt/system.hpp"

namespace shpt {

struct RoundCost {
  std::uint64_t max_reads_per_timeout = 0;
  std::uint64_t max_msgs_per_timeout = 0;
};

/// One fair round: every peer first processes the messages that were in its
/// channel at round start (later arrivals wait), then executes Timeout once.
/// Returns the per-timeout access maxima observed this round.
RoundCost run_round(SystemState& s);

/// Whether draining the currently queued traffic (on the given copy) leaves
/// the stored structure untouched. A converged system with only
/// self-consistent presentations in flight is quiescent in this sense.
bool strictly_quiescent(SystemState s);

}  // namespace shpt
