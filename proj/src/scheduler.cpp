#include "shpt/scheduler.hpp"

#include <vector>

#include "shpt/protocol.hpp"

namespace shpt {
namespace {

/// Delivers everything queued at entry; messages enqueued while processing
/// stay for the next pass.
void message_phase(SystemState& s) {
  std::vector<std::size_t> pending(s.num_peers());
  for (std::size_t i = 0; i < s.num_peers(); ++i) pending[i] = s.peer(i).channel.size();
  for (std::size_t i = 0; i < s.num_peers(); ++i) {
    for (std::size_t n = 0; n < pending[i]; ++n) {
      Message m = s.peer(i).channel.front();
      s.peer(i).channel.pop_front();
      protocol::handle_message(s, i, m);
    }
  }
}

}  // namespace

RoundCost run_round(SystemState& s) {
  message_phase(s);
  RoundCost cost;
  for (std::size_t i = 0; i < s.num_peers(); ++i) {
    std::uint64_t reads0 = s.metrics().dht_reads;
    std::uint64_t msgs0 = s.metrics().messages_sent;
    protocol::timeout(s, i);
    cost.max_reads_per_timeout =
        std::max(cost.max_reads_per_timeout, s.metrics().dht_reads - reads0);
    cost.max_msgs_per_timeout =
        std::max(cost.max_msgs_per_timeout, s.metrics().messages_sent - msgs0);
  }
  s.bump_round();
  return cost;
}

bool strictly_quiescent(SystemState s) {
  s.log_creations(nullptr);
  std::uint64_t before = s.structure_fingerprint();
  // Drain delegation chains too; each pass handles one hop.
  for (int pass = 0; pass < 4 * BitLabel::kMaxBits; ++pass) {
    bool any = false;
    for (std::size_t i = 0; i < s.num_peers(); ++i) any = any || !s.peer(i).channel.empty();
    if (!any) return true;
    message_phase(s);
    if (s.structure_fingerprint() != before) return false;
  }
  return false;  // traffic would not settle within the hop budget
}

}  // namespace shpt
