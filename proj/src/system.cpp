#include "shpt/system.hpp"

#include <algorithm>
#include <stdexcept>

#include "shpt/rng.hpp"

namespace shpt {
namespace {

void mix(std::uint64_t& h, std::uint64_t v) { h = splitmix64(h ^ v); }

void mix_label(std::uint64_t& h, const BitLabel& l) {
  mix(h, l.packed_bits());
  mix(h, static_cast<std::uint64_t>(l.size()) + 0x10001);
}

void mix_opt(std::uint64_t& h, const std::optional<BitLabel>& l) {
  if (l) mix_label(h, *l);
  else mix(h, 0xdeadull);
}

void mix_node(std::uint64_t& h, const HptNode& n) {
  mix_label(h, n.label);
  mix(h, n.kind == NodeKind::msd ? 2 : 1);
  mix_opt(h, n.parent_edge);
  mix_opt(h, n.child0);
  mix_opt(h, n.child1);
  mix_opt(h, n.key);
  mix(h, n.key2.size());
  for (const auto& s : n.key2) mix_label(h, s);
  mix_opt(h, n.r);
}

}  // namespace

void HashRegistry::note(std::uint64_t h, const BitLabel& label) {
  auto [it, inserted] = seen_.emplace(h, label);
  if (!inserted && it->second != label)
    throw std::logic_error("hash collision between labels " + it->second.str() + " and " +
                           label.str());
}

SystemState::SystemState(std::uint64_t seed, std::size_t num_peers) : seed_(seed) {
  if (num_peers == 0) throw std::invalid_argument("SystemState: need at least one peer");
  hash_seed_ = splitmix64(seed ^ 0x5a17ull);
  Rng rng(splitmix64(seed ^ 0x9ee25ull));
  std::set<std::uint64_t> used;
  peers_.resize(num_peers);
  for (std::size_t i = 0; i < num_peers; ++i) {
    std::uint64_t pos;
    do {
      pos = rng.next();
    } while (!used.insert(pos).second);
    peers_[i].position = pos;
    ring_.emplace_back(pos, i);
  }
  std::sort(ring_.begin(), ring_.end());
}

std::size_t SystemState::responsible_peer(const BitLabel& label) {
  std::uint64_t h = ring_hash(label, hash_seed_);
  registry_.note(h, label);
  // Successor rule on the ring.
  auto it = std::lower_bound(ring_.begin(), ring_.end(), std::make_pair(h, std::size_t{0}));
  if (it == ring_.end()) it = ring_.begin();
  return it->second;
}

bool SystemState::placed_correctly(std::size_t peer_idx, const BitLabel& label) {
  return responsible_peer(label) == peer_idx;
}

std::optional<HptNode> SystemState::dht_search(const BitLabel& label) {
  ++metrics_.dht_reads;
  Peer& p = peers_[responsible_peer(label)];
  auto it = p.store.find(label);
  if (it == p.store.end()) return std::nullopt;
  return it->second;
}

InsertVerdict SystemState::dht_insert(const HptNode& node) {
  Peer& p = peers_[responsible_peer(node.label)];
  auto it = p.store.find(node.label);
  if (it != p.store.end()) {
    const HptNode& existing = it->second;
    if (existing.kind == NodeKind::patricia && existing.key.has_value()) {
      if (node.key && *node.key == *existing.key) return InsertVerdict::kept_existing;
      if (node.key && *node.key != *existing.key) p.loose_keys.insert(*node.key);
      return InsertVerdict::rejected;
    }
  }
  p.store[node.label] = node;
  ++metrics_.dht_writes;
  if (node.kind == NodeKind::patricia) {
    // A freshly inserted node announces itself along each present edge.
    if (auto par = node.parent_label())
      send({MsgKind::linearize, *par, node.label, 0});
    for (int bit : {0, 1}) {
      const auto& e = node.child(bit);
      if (e && !e->empty() && node.label.size() + e->size() <= BitLabel::kMaxBits)
        send({MsgKind::linearize, concat(node.label, *e), node.label, 0});
    }
  }
  return InsertVerdict::stored;
}

void SystemState::send(Message m) {
  ++metrics_.messages_sent;
  peers_[responsible_peer(m.target)].channel.push_back(std::move(m));
}

HptNode* SystemState::locate(const BitLabel& label) {
  return locate_at(responsible_peer(label), label);
}

HptNode* SystemState::locate_at(std::size_t peer_idx, const BitLabel& label) {
  auto& store = peers_[peer_idx].store;
  auto it = store.find(label);
  return it == store.end() ? nullptr : &it->second;
}

void SystemState::erase_node(std::size_t peer_idx, const BitLabel& label) {
  peers_[peer_idx].store.erase(label);
}

std::vector<BitLabel> SystemState::collect_keys() const {
  std::vector<BitLabel> out;
  for (const auto& p : peers_) {
    for (const auto& [_, n] : p.store)
      if (n.key) out.push_back(*n.key);
    out.insert(out.end(), p.loose_keys.begin(), p.loose_keys.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t SystemState::structure_fingerprint() const {
  std::uint64_t h = 0x51ab5eedull;
  for (const auto& p : peers_) {
    mix(h, 0xbeefull);
    for (const auto& [_, n] : p.store) mix_node(h, n);
    for (const auto& k : p.loose_keys) mix_label(h, k);
  }
  return h;
}

std::uint64_t SystemState::full_fingerprint() const {
  std::uint64_t h = structure_fingerprint();
  mix(h, round_);
  for (const auto& p : peers_) {
    mix(h, p.channel.size());
    for (const auto& m : p.channel) {
      mix(h, static_cast<std::uint64_t>(m.kind) + 7);
      mix_label(h, m.target);
      mix_label(h, m.payload);
      mix(h, static_cast<std::uint64_t>(m.hops_left) + 13);
    }
    mix_opt(h, p.timeout_cursor);
  }
  return h;
}

}  // namespace shpt
