#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "shpt/legality.hpp"
#include "shpt/scheduler.hpp"

namespace shpt {

struct RunStats {
  bool converged = false;
  std::size_t rounds_used = 0;
  std::uint64_t max_reads_per_timeout = 0;  // over the repair phase
  std::uint64_t max_msgs_per_timeout = 0;
  std::vector<PhaseCounters> series;  // entry 0 = initial state, then one per round
  LegalityReport final_report;
};

/// Alternates rounds with legality checks until the first legal state or the
/// round cap. Non-convergence is a reported outcome, not an error.
RunStats run_until_legal(SystemState& s, const std::set<BitLabel>& keys, std::size_t max_rounds,
                         const IdealHpt* ideal = nullptr, bool record_series = true);

struct ClosureStats {
  bool stayed_legal = true;
  bool structure_frozen = true;
  std::size_t rounds = 0;
  std::uint64_t max_reads_per_timeout = 0;
  std::uint64_t max_msgs_per_timeout = 0;
};

/// Watches a converged system: runs `rounds` further rounds, checking
/// legality at every boundary and that no node is created, deleted or
/// field-modified. Also yields the steady-state per-timeout access maxima.
ClosureStats run_legal_window(SystemState& s, const std::set<BitLabel>& keys, std::size_t rounds,
                              const IdealHpt* ideal = nullptr);

/// Runs extra rounds (up to `cap`) until the state is legal and strictly
/// quiescent. True when reached.
bool settle_quiescent(SystemState& s, const std::set<BitLabel>& keys, std::size_t cap,
                      const IdealHpt* ideal = nullptr);

}  // namespace shpt
