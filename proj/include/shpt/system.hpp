#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shpt/message.hpp"
#include "shpt/node.hpp"

namespace shpt {

/// Guards the collision-free hashing assumption: every label in play must map
/// to a distinct ring position.
class HashRegistry {
 public:
  void note(std::uint64_t h, const BitLabel& label);

 private:
  std::map<std::uint64_t, BitLabel> seen_;
};

struct AccessCounters {
  std::uint64_t dht_reads = 0;
  std::uint64_t dht_writes = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t d_bits = 0;  // total bits of the key set, set by the harness
};

struct Peer {
  std::uint64_t position = 0;                 // point on the [0,1) ring, scaled to 2^64
  std::map<BitLabel, HptNode> store;          // label -> node, ordered for determinism
  std::set<BitLabel> loose_keys;              // keys awaiting integration
  std::deque<Message> channel;                // unbounded, FIFO
  std::optional<BitLabel> timeout_cursor;     // last label visited by Timeout
};

enum class InsertVerdict { stored, kept_existing, rejected };

struct CreationRecord {
  BitLabel label;
  std::string origin;  // "root", "branch", "msd", "key"
};

/// The simulated legal DHT: fixed peers on a ring, a global synchronous
/// store keyed by label hash, per-peer channels, and access accounting.
/// Strictly single-threaded per instance.
class SystemState {
 public:
  SystemState(std::uint64_t seed, std::size_t num_peers);

  std::size_t num_peers() const { return peers_.size(); }
  Peer& peer(std::size_t i) { return peers_[i]; }
  const Peer& peer(std::size_t i) const { return peers_[i]; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t round() const { return round_; }
  void bump_round() { ++round_; }
  void set_round(std::uint64_t r) { round_ = r; }

  AccessCounters& metrics() { return metrics_; }
  const AccessCounters& metrics() const { return metrics_; }

  std::size_t responsible_peer(const BitLabel& label);
  bool placed_correctly(std::size_t peer_idx, const BitLabel& label);

  /// Value copy of the node stored under `label` at its responsible peer.
  /// Counted as one hash table read. Misplaced nodes are invisible.
  std::optional<HptNode> dht_search(const BitLabel& label);

  /// Stores the node at its responsible peer. A Patricia node holding a key
  /// is never overwritten; a rejected incoming key is parked as a loose key
  /// so no key value ever leaves the system. Accepted Patricia nodes are
  /// presented to their edge targets.
  InsertVerdict dht_insert(const HptNode& node);

  void send(Message m);

  /// Synchronous field update on the stored node, addressed by label.
  /// Returns false when no such node is reachable. Counted as a write when
  /// the update reports it changed something.
  template <typename Fn>
  bool update_node(const BitLabel& label, Fn&& fn) {
    HptNode* n = locate(label);
    if (!n) return false;
    if (fn(*n)) ++metrics_.dht_writes;
    return true;
  }

  /// Uncounted lookup at the responsible peer (infrastructure path).
  HptNode* locate(const BitLabel& label);
  HptNode* locate_at(std::size_t peer_idx, const BitLabel& label);

  void erase_node(std::size_t peer_idx, const BitLabel& label);

  /// Every key value present anywhere: node key fields plus loose keys.
  std::vector<BitLabel> collect_keys() const;

  /// Hash over stored nodes and loose keys only (no channels, cursors or
  /// counters): detects structural mutation between rounds.
  std::uint64_t structure_fingerprint() const;
  /// Hash over everything including channels and cursors: replay identity.
  std::uint64_t full_fingerprint() const;

  void log_creations(std::vector<CreationRecord>* sink) { creation_sink_ = sink; }
  void note_creation(const BitLabel& label, const char* origin) {
    if (creation_sink_) creation_sink_->push_back({label, origin});
  }

 private:
  std::uint64_t seed_;
  std::uint64_t hash_seed_;
  std::uint64_t round_ = 0;
  std::vector<Peer> peers_;
  std::vector<std::pair<std::uint64_t, std::size_t>> ring_;  // (position, peer index)
  AccessCounters metrics_;
  HashRegistry registry_;
  std::vector<CreationRecord>* creation_sink_ = nullptr;
};

}  // namespace shpt
