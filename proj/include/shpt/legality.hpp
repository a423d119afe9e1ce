#pragma once

#include <set>
#include <string>
#include <vector>

#include "shpt/ideal.hpp"
#include "shpt/instrumentation.hpp"
#include "shpt/system.hpp"

namespace shpt {

struct Violation {
  std::string rule;
  BitLabel label;
  std::string detail;
};

struct LegalityReport {
  bool legal = false;
  std::vector<Violation> violations;
  PhaseCounters counters;

  std::string summary(std::size_t max_items = 8) const;
};

/// Verifies every clause of the legal-state definition against the ideal
/// structure for `keys`: exact node sets and kinds, placement at responsible
/// peers, bidirectional closest-pair edges, auxiliary nodes with their edges,
/// and a valid stable key2/r matching (any assignment accepted as long as
/// every non-root key2 node is full and leaves point back). Pass the
/// prebuilt ideal to amortize repeated checks.
LegalityReport check_legal(SystemState& s, const std::set<BitLabel>& keys,
                           const IdealHpt* ideal = nullptr);

/// Strict variant: additionally requires queued traffic to be harmless (see
/// strictly_quiescent).
LegalityReport check_legal_strict(SystemState& s, const std::set<BitLabel>& keys,
                                  const IdealHpt* ideal = nullptr);

}  // namespace shpt
