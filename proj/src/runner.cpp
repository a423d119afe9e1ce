#include "shpt/runner.hpp"

namespace shpt {

RunStats run_until_legal(SystemState& s, const std::set<BitLabel>& keys, std::size_t max_rounds,
                         const IdealHpt* ideal, bool record_series) {
  IdealHpt local;
  if (!ideal) {
    local = build_ideal_hpt(keys);
    ideal = &local;
  }
  RunStats stats;
  if (record_series) stats.series.push_back(compute_phase_counters(s, keys));
  stats.final_report = check_legal(s, keys, ideal);
  if (stats.final_report.legal) {
    stats.converged = true;
    return stats;
  }
  for (std::size_t r = 1; r <= max_rounds; ++r) {
    RoundCost cost = run_round(s);
    stats.max_reads_per_timeout = std::max(stats.max_reads_per_timeout, cost.max_reads_per_timeout);
    stats.max_msgs_per_timeout = std::max(stats.max_msgs_per_timeout, cost.max_msgs_per_timeout);
    if (record_series) stats.series.push_back(compute_phase_counters(s, keys));
    stats.final_report = check_legal(s, keys, ideal);
    stats.rounds_used = r;
    if (stats.final_report.legal) {
      stats.converged = true;
      break;
    }
  }
  return stats;
}

ClosureStats run_legal_window(SystemState& s, const std::set<BitLabel>& keys, std::size_t rounds,
                              const IdealHpt* ideal) {
  IdealHpt local;
  if (!ideal) {
    local = build_ideal_hpt(keys);
    ideal = &local;
  }
  ClosureStats cs;
  cs.rounds = rounds;
  std::uint64_t frozen = s.structure_fingerprint();
  for (std::size_t r = 0; r < rounds; ++r) {
    RoundCost cost = run_round(s);
    cs.max_reads_per_timeout = std::max(cs.max_reads_per_timeout, cost.max_reads_per_timeout);
    cs.max_msgs_per_timeout = std::max(cs.max_msgs_per_timeout, cost.max_msgs_per_timeout);
    if (s.structure_fingerprint() != frozen) cs.structure_frozen = false;
    if (!check_legal(s, keys, ideal).legal) cs.stayed_legal = false;
    if (!cs.structure_frozen || !cs.stayed_legal) break;
  }
  return cs;
}

bool settle_quiescent(SystemState& s, const std::set<BitLabel>& keys, std::size_t cap,
                      const IdealHpt* ideal) {
  IdealHpt local;
  if (!ideal) {
    local = build_ideal_hpt(keys);
    ideal = &local;
  }
  for (std::size_t r = 0; r <= cap; ++r) {
    if (check_legal(s, keys, ideal).legal && strictly_quiescent(s)) return true;
    if (r < cap) run_round(s);
  }
  return false;
}

}  // namespace shpt
