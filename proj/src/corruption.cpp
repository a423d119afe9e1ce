#include "shpt/corruption.hpp"

#include <algorithm>
#include <stdexcept>

#include "shpt/msd.hpp"
#include "shpt/rng.hpp"

namespace shpt {
namespace {

struct NodeRef {
  std::size_t peer;
  BitLabel label;
};

std::vector<NodeRef> all_nodes(const SystemState& s) {
  std::vector<NodeRef> out;
  for (std::size_t i = 0; i < s.num_peers(); ++i)
    for (const auto& [label, _] : s.peer(i).store) out.push_back({i, label});
  return out;
}

BitLabel random_key_biased_label(Rng& rng, const std::set<BitLabel>& keys) {
  // Half the time derive from a key so damage lands near live structure.
  if (!keys.empty() && rng.chance(1, 2)) {
    std::vector<BitLabel> ks(keys.begin(), keys.end());
    const BitLabel& k = rng.pick(ks);
    if (k.size() > 0 && rng.chance(1, 2)) return k.prefix(rng.range(0, k.size()));
    int room = BitLabel::kMaxBits - k.size();
    if (room > 0) return concat(k, rng.label(1, std::min(4, room)));
    return k;
  }
  return rng.label(0, 16);
}

struct Corruptor {
  SystemState& s;
  Rng rng;
  const std::set<BitLabel>& keys;

  HptNode* node_at(const NodeRef& ref) { return s.locate_at(ref.peer, ref.label); }

  bool keyed(const NodeRef& ref) {
    HptNode* n = node_at(ref);
    return n && n->key.has_value();
  }

  bool clear_edge() {
    auto nodes = all_nodes(s);
    if (nodes.empty()) return false;
    HptNode* n = node_at(rng.pick(nodes));
    if (!n) return false;
    switch (rng.range(0, 2)) {
      case 0: n->parent_edge.reset(); break;
      case 1: n->child0.reset(); break;
      case 2: n->child1.reset(); break;
    }
    return true;
  }

  bool scramble_edge() {
    auto nodes = all_nodes(s);
    if (nodes.empty()) return false;
    HptNode* n = node_at(rng.pick(nodes));
    if (!n) return false;
    int which = rng.range(0, 2);
    if (which == 0) {
      n->parent_edge = rng.label(1, std::max(1, std::min(8, n->label.size() + 1)));
    } else {
      int room = BitLabel::kMaxBits - n->label.size();
      if (room < 1) return false;
      n->child(which - 1) = rng.label(1, std::min(8, room));
    }
    return true;
  }

  bool delete_node() {
    auto nodes = all_nodes(s);
    std::erase_if(nodes, [&](const NodeRef& r) { return keyed(r); });
    if (nodes.empty()) return false;
    NodeRef victim = rng.pick(nodes);
    s.erase_node(victim.peer, victim.label);
    return true;
  }

  bool add_spurious(NodeKind kind) {
    BitLabel label = random_key_biased_label(rng, keys);
    std::size_t owner = s.responsible_peer(label);
    if (HptNode* existing = s.locate_at(owner, label); existing && existing->key) return false;
    HptNode n;
    n.label = label;
    n.kind = kind;
    if (label.size() > 0 && rng.chance(2, 3))
      n.parent_edge = label.suffix_from(rng.range(0, label.size() - 1));
    int room = BitLabel::kMaxBits - label.size();
    if (room > 0 && rng.chance(1, 2)) {
      BitLabel e = rng.label(1, std::min(6, room));
      n.child(e.bit(0)) = e;
    }
    s.peer(owner).store[label] = n;
    return true;
  }

  bool move_key_to_wrong_label() {
    auto nodes = all_nodes(s);
    std::erase_if(nodes, [&](const NodeRef& r) { return !keyed(r); });
    if (nodes.empty()) return false;
    NodeRef victim = rng.pick(nodes);
    HptNode moved = *node_at(victim);
    for (int attempt = 0; attempt < 8; ++attempt) {
      BitLabel l = rng.label(1, 16);
      if (l == moved.label) continue;
      std::size_t owner = s.responsible_peer(l);
      if (HptNode* existing = s.locate_at(owner, l); existing && existing->key) continue;
      s.erase_node(victim.peer, victim.label);
      moved.label = l;
      s.peer(owner).store[l] = moved;
      return true;
    }
    return false;
  }

  bool misplace_node() {
    if (s.num_peers() < 2) return false;
    auto nodes = all_nodes(s);
    if (nodes.empty()) return false;
    NodeRef victim = rng.pick(nodes);
    std::size_t target = rng.below(s.num_peers());
    if (target == victim.peer) target = (target + 1) % s.num_peers();
    if (s.peer(target).store.count(victim.label)) return false;
    HptNode moved = *node_at(victim);
    s.erase_node(victim.peer, victim.label);
    s.peer(target).store[victim.label] = moved;
    return true;
  }

  bool corrupt_key2_slot() {
    auto nodes = all_nodes(s);
    std::erase_if(nodes, [&](const NodeRef& r) {
      HptNode* n = node_at(r);
      return !n || n->kind != NodeKind::patricia;
    });
    if (nodes.empty()) return false;
    HptNode* n = node_at(rng.pick(nodes));
    if (!n) return false;
    if (rng.chance(1, 3)) {
      n->key2.clear();
    } else {
      n->key2.clear();
      n->key2.push_back(random_key_biased_label(rng, keys));
    }
    return true;
  }

  bool corrupt_r() {
    auto nodes = all_nodes(s);
    std::erase_if(nodes, [&](const NodeRef& r) {
      HptNode* n = node_at(r);
      return !n || n->kind != NodeKind::patricia;
    });
    if (nodes.empty()) return false;
    HptNode* n = node_at(rng.pick(nodes));
    if (!n) return false;
    if (rng.chance(1, 3))
      n->r.reset();
    else
      n->r = random_key_biased_label(rng, keys);
    return true;
  }

  bool inject_stray_message() {
    Message m;
    int k = rng.range(0, 2);
    m.kind = k == 0 ? MsgKind::linearize : (k == 1 ? MsgKind::key2_probe : MsgKind::leaf_present);
    m.target = random_key_biased_label(rng, keys);
    m.payload = random_key_biased_label(rng, keys);
    m.hops_left = rng.range(1, 16);
    s.peer(s.responsible_peer(m.target)).channel.push_back(m);
    return true;
  }

  bool apply(CorruptionOp op) {
    switch (op) {
      case CorruptionOp::clear_edge: return clear_edge();
      case CorruptionOp::scramble_edge: return scramble_edge();
      case CorruptionOp::delete_node: return delete_node();
      case CorruptionOp::add_spurious_patricia: return add_spurious(NodeKind::patricia);
      case CorruptionOp::add_spurious_msd: return add_spurious(NodeKind::msd);
      case CorruptionOp::move_key_to_wrong_label: return move_key_to_wrong_label();
      case CorruptionOp::misplace_node: return misplace_node();
      case CorruptionOp::corrupt_key2_slot: return corrupt_key2_slot();
      case CorruptionOp::corrupt_r: return corrupt_r();
      case CorruptionOp::inject_stray_message: return inject_stray_message();
    }
    return false;
  }
};

}  // namespace

const char* corruption_op_name(CorruptionOp op) {
  switch (op) {
    case CorruptionOp::clear_edge: return "clear-edge";
    case CorruptionOp::scramble_edge: return "scramble-edge";
    case CorruptionOp::delete_node: return "delete-node";
    case CorruptionOp::add_spurious_patricia: return "add-spurious-patricia";
    case CorruptionOp::add_spurious_msd: return "add-spurious-msd";
    case CorruptionOp::move_key_to_wrong_label: return "move-key-to-wrong-label";
    case CorruptionOp::misplace_node: return "misplace-node-at-wrong-peer";
    case CorruptionOp::corrupt_key2_slot: return "corrupt-key2-slot";
    case CorruptionOp::corrupt_r: return "corrupt-r";
    case CorruptionOp::inject_stray_message: return "inject-stray-message";
  }
  return "?";
}

std::optional<CorruptionOp> corruption_op_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(CorruptionOp::inject_stray_message); ++i) {
    auto op = static_cast<CorruptionOp>(i);
    if (name == corruption_op_name(op)) return op;
  }
  return std::nullopt;
}

CorruptionScript CorruptionScript::level(const std::string& name, std::uint64_t seed) {
  CorruptionScript sc;
  sc.seed = seed;
  using Op = CorruptionOp;
  if (name == "none") {
  } else if (name == "low") {
    sc.ops = {{Op::clear_edge, 2}, {Op::corrupt_r, 1}, {Op::corrupt_key2_slot, 1},
              {Op::inject_stray_message, 1}};
  } else if (name == "medium") {
    sc.ops = {{Op::clear_edge, 4},        {Op::scramble_edge, 3},
              {Op::delete_node, 3},       {Op::move_key_to_wrong_label, 1},
              {Op::misplace_node, 1},     {Op::corrupt_key2_slot, 2},
              {Op::corrupt_r, 2},         {Op::inject_stray_message, 2}};
  } else if (name == "high") {
    sc.ops = {{Op::clear_edge, 8},        {Op::scramble_edge, 6},
              {Op::delete_node, 8},       {Op::add_spurious_patricia, 4},
              {Op::add_spurious_msd, 3},  {Op::move_key_to_wrong_label, 3},
              {Op::misplace_node, 3},     {Op::corrupt_key2_slot, 4},
              {Op::corrupt_r, 4},         {Op::inject_stray_message, 4}};
  } else if (name == "strip") {
    sc.ops = {{Op::delete_node, 1 << 20}};
  } else if (name == "genesis") {
    sc.genesis = true;
  } else {
    throw std::invalid_argument("unknown corruption level: " + name);
  }
  return sc;
}

void materialize_ideal(SystemState& s, const IdealHpt& ideal, const std::set<BitLabel>& keys) {
  for (const auto& p : ideal.patricia) {
    HptNode n;
    n.label = p;
    if (keys.count(p)) n.key = p;
    if (!p.empty()) n.parent_edge = edge_between(ideal.parent_of.at(p), p);
    if (auto it = ideal.children_of.find(p); it != ideal.children_of.end())
      for (const auto& c : it->second) {
        BitLabel e = edge_between(p, c);
        n.child(e.bit(0)) = e;
      }
    if (auto it = ideal.key2_assignment.find(p); it != ideal.key2_assignment.end())
      n.key2 = it->second;
    if (auto it = ideal.r_of.find(p); it != ideal.r_of.end()) n.r = it->second;
    s.peer(s.responsible_peer(p)).store[p] = n;
  }
  for (const auto& [child, m] : ideal.msd_between) {
    HptNode n;
    n.label = m;
    n.kind = NodeKind::msd;
    n.parent_edge = edge_between(ideal.parent_of.at(child), m);
    BitLabel e = edge_between(m, child);
    n.child(e.bit(0)) = e;
    s.peer(s.responsible_peer(m)).store[m] = n;
  }
}

SystemState generate_initial_state(const std::set<BitLabel>& keys, const CorruptionScript& script,
                                   std::size_t num_peers, std::uint64_t system_seed) {
  if (keys.empty()) throw std::invalid_argument("generate_initial_state: empty key set");
  SystemState s(system_seed, num_peers);
  Rng rng(splitmix64(script.seed ^ 0xc0bb1edull));

  if (script.genesis) {
    for (const auto& k : keys) s.peer(rng.below(num_peers)).loose_keys.insert(k);
  } else {
    materialize_ideal(s, build_ideal_hpt(keys), keys);
    Corruptor c{s, rng, keys};
    for (const auto& [op, count] : script.ops)
      for (int i = 0; i < count; ++i)
        if (!c.apply(op) && count > 1000) break;  // bulk ops stop once exhausted
  }

  auto present = s.collect_keys();
  std::vector<BitLabel> want(keys.begin(), keys.end());
  if (present != want)
    throw std::logic_error("corruption script violated key preservation");

  s.metrics() = AccessCounters{};
  for (const auto& k : keys) s.metrics().d_bits += static_cast<std::uint64_t>(k.size());
  return s;
}

}  // namespace shpt
