#include "shpt/protocol.hpp"

#include <algorithm>

#include "shpt/msd.hpp"
#include "shpt/search.hpp"

namespace shpt::protocol {
namespace {

constexpr int kMax = BitLabel::kMaxBits;

int probe_hops(const BitLabel& origin) { return std::max(1, origin.size()); }

bool fits(const BitLabel& base, const BitLabel& edge) {
  return base.size() + edge.size() <= kMax;
}

/// Both halves of the edge between two Patricia nodes are present and agree.
bool bidirectional(const HptNode& parent, const HptNode& child) {
  if (!parent.label.is_proper_prefix_of(child.label)) return false;
  BitLabel e = edge_between(parent.label, child.label);
  return parent.child(e.bit(0)) == e && child.parent_edge == e;
}

void integrate_loose_keys(SystemState& s, std::size_t peer_idx) {
  Peer& p = s.peer(peer_idx);
  if (p.loose_keys.empty()) return;
  std::vector<BitLabel> keys(p.loose_keys.begin(), p.loose_keys.end());
  for (const auto& k : keys) {
    HptNode v;
    v.label = k;
    v.key = k;
    auto verdict = s.dht_insert(v);
    if (verdict != InsertVerdict::rejected) {
      s.peer(peer_idx).loose_keys.erase(k);
      if (verdict == InsertVerdict::stored) s.note_creation(k, "key");
    }
  }
}

void handle_key2_probe(SystemState& s, HptNode& w, const BitLabel& origin, int hops) {
  if (w.kind == NodeKind::msd) return;
  if (w.is_key2_node()) {
    for (const auto& slot : w.key2) {
      if (!origin.is_proper_prefix_of(slot)) continue;
      // Answer: the asking node copies this value; w sheds its own copy on a
      // later check once the leaf points below.
      BitLabel value = slot;
      s.update_node(origin, [&](HptNode& n) {
        if (n.is_key2_node() && n.key2_has_free_slot() && !n.key2_contains(value)) {
          n.key2.push_back(value);
          return true;
        }
        return false;
      });
      return;
    }
  }
  if (hops > 1) {
    if (auto plabel = w.parent_label())
      s.send({MsgKind::key2_probe, *plabel, origin, hops - 1});
  }
}

void handle_leaf_present(SystemState& s, HptNode& w, const BitLabel& origin, int hops) {
  if (w.kind == NodeKind::msd) return;
  if (w.is_key2_node() && (w.key2_contains(origin) || w.key2_has_free_slot())) {
    auto leaf = s.dht_search(origin);
    if (!leaf || leaf->kind != NodeKind::patricia || leaf->children() > 0) return;  // stale
    if (leaf->r && *leaf->r != w.label) return;  // already owned elsewhere
    if (!w.key2_contains(origin) && w.key2_has_free_slot()) w.key2.push_back(origin);
    if (w.key2_contains(origin)) {
      BitLabel me = w.label;
      s.update_node(origin, [&](HptNode& n) {
        if (n.r != me) {
          n.r = me;
          return true;
        }
        return false;
      });
    }
    return;
  }
  if (hops > 1) {
    if (auto plabel = w.parent_label())
      s.send({MsgKind::leaf_present, *plabel, origin, hops - 1});
  }
}

}  // namespace

void multi_linearize(HptNode& fresh, const std::vector<BitLabel>& targets) {
  for (const auto& t : targets) {
    if (t == fresh.label) continue;
    if (t.is_proper_prefix_of(fresh.label)) {
      if (!fresh.parent_edge) fresh.parent_edge = fresh.label.suffix_from(t.size());
    } else if (fresh.label.is_proper_prefix_of(t)) {
      auto& edge = fresh.child(t.bit(fresh.label.size()));
      if (!edge) edge = t.suffix_from(fresh.label.size());
    }
  }
}

void linearize(SystemState& s, HptNode& v, const BitLabel& u) {
  if (v.kind == NodeKind::msd || u == v.label) return;
  if (lcp(u, v.label).size() < v.label.size()) {
    // u is above v, or off on another branch.
    if (!v.parent_edge && u.is_proper_prefix_of(v.label)) {
      v.parent_edge = v.label.suffix_from(u.size());
      return;
    }
    auto plabel = v.parent_label();
    if (!plabel) return;
    if (*plabel != u) s.send({MsgKind::linearize, *plabel, u, 0});
    if (plabel->is_proper_prefix_of(u) && u.is_proper_prefix_of(v.label))
      v.parent_edge = v.label.suffix_from(u.size());  // u slots in between
  } else if (v.label.is_proper_prefix_of(u)) {
    int side = u.bit(v.label.size());
    auto& edge = v.child(side);
    if (!edge) {
      edge = u.suffix_from(v.label.size());
      return;
    }
    if (!fits(v.label, *edge)) return;  // malformed edge, cleared elsewhere
    BitLabel c = concat(v.label, *edge);
    if (c.is_proper_prefix_of(u)) {
      s.send({MsgKind::linearize, c, u, 0});  // current child sits above u
    } else if (u.is_proper_prefix_of(c)) {
      edge = u.suffix_from(v.label.size());   // u slots in between
      s.send({MsgKind::linearize, c, u, 0});  // old child learns its new parent
    } else if (c != u) {
      // c and u diverge below v: u learns about v, and the edge comparison
      // at u later constructs the fork node.
      s.send({MsgKind::linearize, u, v.label, 0});
    }
  }
}

bool check_node_info(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v) return false;

  if (v->parent_edge && (v->parent_edge->empty() || !v->parent_edge->is_suffix_of(label)))
    v->parent_edge.reset();
  if (v->child0 && (v->child0->empty() || v->child0->bit(0) != 0)) v->child0.reset();
  if (v->child1 && (v->child1->empty() || v->child1->bit(0) != 1)) v->child1.reset();

  if (v->kind == NodeKind::msd) return true;

  if (v->key && *v->key != label) {
    // Wrong label: the key moves to a node of its own label; this record goes.
    HptNode w;
    w.label = *v->key;
    w.key = *v->key;
    s.erase_node(peer_idx, label);
    s.dht_insert(w);
    s.note_creation(w.label, "key");
    return false;
  }

  std::erase_if(v->key2, [&](const BitLabel& slot) { return !label.is_prefix_of(slot); });
  if (!v->is_key2_node()) v->key2.clear();
  if (v->key2.size() > v->key2_capacity()) v->key2.resize(v->key2_capacity());

  if (v->r && !v->r->is_prefix_of(label)) v->r.reset();
  if (v->r && v->children() > 0) v->r.reset();
  return true;
}

bool check_parent_edge_info(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v) return false;
  if (v->kind == NodeKind::msd || label.empty()) return true;

  if (!v->parent_edge) {
    auto w = binary_prefix_search(s, label);
    if (!w) {
      HptNode root;  // no prefix node anywhere: the root is gone
      s.dht_insert(root);
      s.note_creation(root.label, "root");
    } else {
      v = s.locate_at(peer_idx, label);  // probe cannot delete, but stay exact
      if (v) v->parent_edge = label.suffix_from(w->label.size());
    }
    return true;
  }

  auto plabel = v->parent_label();
  if (!plabel) {
    v->parent_edge.reset();
    return true;
  }
  auto par = s.dht_search(*plabel);
  if (!par || par->kind == NodeKind::msd) {
    v->parent_edge.reset();
    return true;
  }

  const auto& epar = par->child(label.bit(plabel->size()));
  if (!epar || epar->empty()) {
    // The parent is missing its half of the edge; show ourselves.
    s.send({MsgKind::linearize, *plabel, label, 0});
    return true;
  }
  BitLabel ep = *epar;
  BitLabel pv = *v->parent_edge;
  if (ep != pv && !ep.is_prefix_of(pv) && !pv.is_prefix_of(ep)) {
    // The parent points to a sibling branch: a fork node belongs at the lcp.
    if (!fits(*plabel, ep)) return true;  // sibling label is junk; par repairs it
    BitLabel sibling = concat(*plabel, ep);
    BitLabel fork = lcp(label, sibling);
    auto occupant = s.dht_search(fork);
    if (occupant && occupant->kind != NodeKind::msd) {
      s.send({MsgKind::linearize, fork, label, 0});
    } else {
      HptNode n;
      n.label = fork;
      multi_linearize(n, {label, *plabel, sibling});
      s.dht_insert(n);
      s.note_creation(fork, "branch");
    }
    return true;
  }

  if (par->kind == NodeKind::patricia && ep == pv && msd_missing(*plabel, label)) {
    HptNode m;
    m.label = *msd_label(*plabel, label);
    m.kind = NodeKind::msd;
    multi_linearize(m, {label, *plabel});
    auto occupant = s.dht_search(m.label);
    bool same_edges = occupant && occupant->parent_edge == m.parent_edge &&
                      occupant->child0 == m.child0 && occupant->child1 == m.child1;
    if (!occupant || (occupant->kind == NodeKind::msd && !same_edges)) {
      s.dht_insert(m);
      s.note_creation(m.label, "msd");
    }
  }
  return true;
}

bool check_child_edge_info(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v) return false;
  if (v->kind != NodeKind::patricia) return true;
  for (int side : {0, 1}) {
    const auto& edge = v->child(side);
    if (!edge) continue;
    if (!fits(label, *edge)) {
      v->child(side).reset();
      continue;
    }
    auto c = s.dht_search(concat(label, *edge));
    if (!c || c->kind == NodeKind::msd) v->child(side).reset();
  }
  return true;
}

bool check_validity(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v) return false;

  if (v->kind == NodeKind::msd) {
    bool ok = false;
    auto plabel = v->parent_label();
    auto ce = v->msd_child_edge();
    if (plabel && ce && fits(label, *ce)) {
      auto p = s.dht_search(*plabel);
      auto c = s.dht_search(concat(label, *ce));
      if (p && c && p->kind == NodeKind::patricia && c->kind == NodeKind::patricia &&
          bidirectional(*p, *c)) {
        auto want = msd_label(p->label, c->label);
        ok = want && *want == label;
      }
    }
    if (!ok) {
      s.erase_node(peer_idx, label);
      return false;
    }
    return true;
  }

  if (!v->key && v->children() < 2 && !label.empty()) {
    s.erase_node(peer_idx, label);  // unnecessary from where it stands
    return false;
  }
  return true;
}

bool check_key2_info(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v) return false;
  if (v->kind != NodeKind::patricia) return true;

  if (v->is_key2_node()) {
    std::vector<BitLabel> slots = v->key2;
    for (const auto& slot : slots) {
      auto k = s.dht_search(slot);
      if (!k || k->kind == NodeKind::msd || k->children() > 0 ||
          (k->r && label.is_proper_prefix_of(*k->r))) {
        v = s.locate_at(peer_idx, label);
        if (!v) return false;
        v->key2_erase(slot);  // someone deeper owns it, or it is no leaf
      } else if (!k->r || k->r->is_proper_prefix_of(label)) {
        s.update_node(slot, [&](HptNode& n) {
          if (n.r != label) {
            n.r = label;
            return true;
          }
          return false;
        });
      }
    }
    v = s.locate_at(peer_idx, label);
    if (!v) return false;
    if (v->key2_has_free_slot() && !label.empty()) {
      if (auto plabel = v->parent_label())
        s.send({MsgKind::key2_probe, *plabel, label, probe_hops(label)});
    }
    if (v->is_root() && v->children() == 0 && v->key) {
      // Degenerate single-key-at-root case: the root is its own leaf.
      if (!v->key2_contains(label) && v->key2_has_free_slot()) v->key2.push_back(label);
      if (v->key2_contains(label) && v->r != label) v->r = label;
    }
    return true;
  }

  if (v->children() == 0) {
    if (v->r) {
      auto k = s.dht_search(*v->r);
      if (!k || k->kind == NodeKind::msd || !k->is_key2_node()) {
        v->r.reset();
      } else if (k->key2_contains(label)) {
        // consistent
      } else if (k->key2_has_free_slot()) {
        s.update_node(*v->r, [&](HptNode& n) {
          if (!n.key2_contains(label) && n.key2_has_free_slot()) {
            n.key2.push_back(label);
            return true;
          }
          return false;
        });
      } else {
        v->r.reset();
      }
    } else if (auto plabel = v->parent_label()) {
      s.send({MsgKind::leaf_present, *plabel, label, probe_hops(label)});
    }
  }
  return true;
}

void linearize_timeout(SystemState& s, std::size_t peer_idx, const BitLabel& label) {
  HptNode* v = s.locate_at(peer_idx, label);
  if (!v || v->kind != NodeKind::patricia) return;
  if (auto plabel = v->parent_label()) s.send({MsgKind::linearize, *plabel, label, 0});
  for (int side : {0, 1}) {
    const auto& edge = v->child(side);
    if (edge && !edge->empty() && fits(label, *edge))
      s.send({MsgKind::linearize, concat(label, *edge), label, 0});
  }
}

void timeout(SystemState& s, std::size_t peer_idx) {
  integrate_loose_keys(s, peer_idx);

  Peer& p = s.peer(peer_idx);
  if (p.store.empty()) return;
  auto it = p.timeout_cursor ? p.store.upper_bound(*p.timeout_cursor) : p.store.begin();
  if (it == p.store.end()) it = p.store.begin();
  BitLabel label = it->first;
  p.timeout_cursor = label;

  if (!s.placed_correctly(peer_idx, label)) {
    HptNode node = it->second;
    s.erase_node(peer_idx, label);
    s.dht_insert(node);  // lands at the responsible peer, same collision rules
    return;
  }

  if (!check_node_info(s, peer_idx, label)) return;
  if (!check_parent_edge_info(s, peer_idx, label)) return;
  if (!check_child_edge_info(s, peer_idx, label)) return;
  if (!check_validity(s, peer_idx, label)) return;
  if (!check_key2_info(s, peer_idx, label)) return;
  linearize_timeout(s, peer_idx, label);
}

void handle_message(SystemState& s, std::size_t peer_idx, const Message& m) {
  HptNode* node = s.locate_at(peer_idx, m.target);
  if (!node) return;  // no such node here: the message dies
  switch (m.kind) {
    case MsgKind::linearize:
      linearize(s, *node, m.payload);
      break;
    case MsgKind::key2_probe:
      handle_key2_probe(s, *node, m.payload, m.hops_left);
      break;
    case MsgKind::leaf_present:
      handle_leaf_present(s, *node, m.payload, m.hops_left);
      break;
  }
}

}  // namespace shpt::protocol
