#include "shpt/instrumentation.hpp"

#include <map>
#include <vector>

#include "shpt/msd.hpp"

namespace shpt {
namespace {

struct Snapshot {
  std::vector<const HptNode*> nodes;
  std::multimap<BitLabel, const HptNode*> by_label;  // misplaced copies included

  bool patricia_at(const BitLabel& l) const {
    auto [lo, hi] = by_label.equal_range(l);
    for (auto it = lo; it != hi; ++it)
      if (it->second->kind == NodeKind::patricia) return true;
    return false;
  }
  const HptNode* any_at(const BitLabel& l) const {
    auto it = by_label.find(l);
    return it == by_label.end() ? nullptr : it->second;
  }
};

Snapshot snapshot(const SystemState& s) {
  Snapshot snap;
  for (std::size_t i = 0; i < s.num_peers(); ++i)
    for (const auto& [label, node] : s.peer(i).store) {
      snap.nodes.push_back(&node);
      snap.by_label.emplace(label, &node);
    }
  return snap;
}

bool bad_parent_edge(const HptNode& n) {
  return n.parent_edge && (n.parent_edge->empty() || !n.parent_edge->is_suffix_of(n.label));
}
bool bad_child_edge(const HptNode& n, int side) {
  const auto& e = n.child(side);
  return e && (e->empty() || e->bit(0) != side);
}

}  // namespace

PhaseCounters compute_phase_counters(const SystemState& s, const std::set<BitLabel>& keys) {
  PhaseCounters c;
  Snapshot snap = snapshot(s);

  std::vector<BitLabel> keyed_labels;
  for (const HptNode* n : snap.nodes)
    if (n->kind == NodeKind::patricia && n->key) keyed_labels.push_back(n->label);

  for (const auto& k : keys) {
    bool stored = false;
    auto [lo, hi] = snap.by_label.equal_range(k);
    for (auto it = lo; it != hi; ++it)
      if (it->second->kind == NodeKind::patricia && it->second->key == k) stored = true;
    if (!stored) ++c.misstored_keys;
  }

  std::set<BitLabel> fork_labels;
  for (std::size_t i = 0; i < keyed_labels.size(); ++i)
    for (std::size_t j = i + 1; j < keyed_labels.size(); ++j)
      fork_labels.insert(lcp(keyed_labels[i], keyed_labels[j]));

  for (const HptNode* n : snap.nodes) {
    if (bad_parent_edge(*n)) ++c.malformed_fields;
    if (bad_child_edge(*n, 0)) ++c.malformed_fields;
    if (bad_child_edge(*n, 1)) ++c.malformed_fields;
    if (n->kind == NodeKind::patricia) {
      if (n->r && !n->r->is_prefix_of(n->label)) ++c.malformed_fields;
      for (const auto& slot : n->key2)
        if (!n->label.is_prefix_of(slot)) ++c.malformed_fields;
    }

    bool keyed_below = false;
    for (const auto& kl : keyed_labels)
      if (n->label.is_prefix_of(kl)) keyed_below = true;
    if (!(n->kind == NodeKind::patricia && n->key) && !keyed_below)
      c.empty_subtree_depth =
          std::max(c.empty_subtree_depth, static_cast<std::uint64_t>(n->label.size()));

    if (n->kind == NodeKind::patricia && !n->is_root()) {
      if (!n->key && !fork_labels.count(n->label)) ++c.unnecessary_nodes;
      if (!n->key && (!n->child0 || !n->child1)) ++c.locally_unnecessary;
      auto plabel = n->parent_label();
      if (!plabel || !snap.patricia_at(*plabel)) ++c.parentless;
    }

    if (n->kind == NodeKind::msd) {
      bool ok = false;
      auto plabel = n->parent_label();
      auto ce = n->msd_child_edge();
      if (plabel && ce && n->label.size() + ce->size() <= BitLabel::kMaxBits) {
        const HptNode* p = snap.any_at(*plabel);
        const HptNode* ch = snap.any_at(concat(n->label, *ce));
        if (p && ch && p->kind == NodeKind::patricia && ch->kind == NodeKind::patricia &&
            p->label.is_proper_prefix_of(ch->label)) {
          BitLabel e = edge_between(p->label, ch->label);
          bool bidir = p->child(e.bit(0)) == e && ch->parent_edge == e;
          auto want = msd_label(p->label, ch->label);
          ok = bidir && want && *want == n->label;
        }
      }
      if (!ok) ++c.incorrect_msd;
    }

    if (n->is_key2_node()) {
      if (!n->is_root() && n->key2_has_free_slot()) ++c.unmatched_key2;
      bool duplicated_below = false;
      for (const auto& slot : n->key2)
        for (const HptNode* w : snap.nodes)
          if (w != n && w->is_key2_node() && n->label.is_proper_prefix_of(w->label) &&
              w->key2_contains(slot))
            duplicated_below = true;
      if (duplicated_below) ++c.unmatched_key2;
    }

    if (n->kind == NodeKind::patricia && n->is_leaf() && !n->is_root()) {
      bool matched = false;
      if (n->r) {
        const HptNode* w = snap.any_at(*n->r);
        if (w && w->is_key2_node() && w->key2_contains(n->label)) matched = true;
      }
      if (!matched) ++c.unmatched_r;
    }
  }

  // Missing auxiliary nodes between current closest Patricia pairs.
  std::set<BitLabel> pat_labels;
  for (const HptNode* n : snap.nodes)
    if (n->kind == NodeKind::patricia) pat_labels.insert(n->label);
  for (const auto& child : pat_labels) {
    if (child.empty()) continue;
    const BitLabel* parent = nullptr;
    for (const auto& q : pat_labels)
      if (q.is_proper_prefix_of(child) && (!parent || q.size() > parent->size())) parent = &q;
    if (!parent) continue;
    auto m = msd_label(*parent, child);
    if (!m) continue;
    bool present = false;
    auto [lo, hi] = snap.by_label.equal_range(*m);
    for (auto it = lo; it != hi; ++it) {
      const HptNode* cand = it->second;
      if (cand->kind != NodeKind::msd) continue;
      auto ce = cand->msd_child_edge();
      if (cand->parent_label() == *parent && ce &&
          cand->label.size() + ce->size() <= BitLabel::kMaxBits &&
          concat(cand->label, *ce) == child)
        present = true;
    }
    if (!present) ++c.missing_msd;
  }
  return c;
}

}  // namespace shpt
