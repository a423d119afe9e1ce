#include "shpt/legality.hpp"

#include <array>
#include <map>
#include <sstream>

#include "shpt/msd.hpp"
#include "shpt/scheduler.hpp"

namespace shpt {
namespace {

struct Checker {
  SystemState& s;
  const IdealHpt& ideal;
  LegalityReport report;

  std::map<BitLabel, std::pair<std::size_t, const HptNode*>> located;  // label -> (peer, node)

  void fail(std::string rule, const BitLabel& label, std::string detail) {
    report.violations.push_back({std::move(rule), label, std::move(detail)});
  }

  void collect() {
    for (std::size_t i = 0; i < s.num_peers(); ++i) {
      for (const auto& [label, node] : s.peer(i).store) {
        auto [it, fresh] = located.emplace(label, std::make_pair(i, &node));
        if (!fresh) fail("node-set", label, "stored at more than one peer");
      }
      for (const auto& k : s.peer(i).loose_keys)
        fail("node-set", k, "loose key awaiting integration");
    }
  }

  void check_node_sets(const std::set<BitLabel>& keys) {
    for (const auto& p : ideal.patricia)
      if (!located.count(p)) fail("node-set", p, "required Patricia node missing");
    for (const auto& m : ideal.msd)
      if (!located.count(m)) fail("node-set", m, "required Msd node missing");
    for (const auto& [label, entry] : located) {
      const HptNode& n = *entry.second;
      bool want_pat = ideal.patricia.count(label) > 0;
      bool want_msd = ideal.msd.count(label) > 0;
      if (!want_pat && !want_msd) {
        fail("node-set", label, "node not part of the legal structure");
        continue;
      }
      if (want_pat && n.kind != NodeKind::patricia) fail("node-set", label, "expected Patricia kind");
      if (want_msd && n.kind != NodeKind::msd) fail("node-set", label, "expected Msd kind");
      if (n.kind == NodeKind::patricia) {
        bool is_key = keys.count(label) > 0;
        if (is_key && n.key != label) fail("keys", label, "key field must equal the label");
        if (!is_key && n.key) fail("keys", label, "key stored at a non-key label");
      }
    }
  }

  void check_placement() {
    for (const auto& [label, entry] : located)
      if (!s.placed_correctly(entry.first, label))
        fail("placement", label, "stored at a peer not responsible for it");
  }

  void check_edges() {
    for (const auto& p : ideal.patricia) {
      auto it = located.find(p);
      if (it == located.end()) continue;
      const HptNode& n = *it->second.second;
      if (n.kind != NodeKind::patricia) continue;

      if (p.empty()) {
        if (n.parent_edge) fail("edges", p, "root must not have a parent edge");
      } else {
        BitLabel want = edge_between(ideal.parent_of.at(p), p);
        if (n.parent_edge != want)
          fail("edges", p, "parent edge differs from the closest-pair edge");
      }
      std::array<std::optional<BitLabel>, 2> want_child;
      if (auto cit = ideal.children_of.find(p); cit != ideal.children_of.end())
        for (const auto& c : cit->second) {
          BitLabel e = edge_between(p, c);
          want_child[e.bit(0)] = e;
        }
      if (n.child0 != want_child[0]) fail("edges", p, "child0 differs from the legal edge");
      if (n.child1 != want_child[1]) fail("edges", p, "child1 differs from the legal edge");
    }
    for (const auto& [child, m] : ideal.msd_between) {
      auto it = located.find(m);
      if (it == located.end()) continue;
      const HptNode& n = *it->second.second;
      if (n.kind != NodeKind::msd) continue;
      const BitLabel& parent = ideal.parent_of.at(child);
      if (n.parent_edge != edge_between(parent, m))
        fail("msd-edges", m, "parent edge must point at the surrounding Patricia node");
      BitLabel e = edge_between(m, child);
      if (n.child(e.bit(0)) != e || n.child(1 - e.bit(0)))
        fail("msd-edges", m, "needs exactly one child edge toward the lower Patricia node");
      if (n.key || !n.key2.empty() || n.r) fail("msd-edges", m, "msd nodes carry no key data");
    }
  }

  void check_key2() {
    for (const auto& [label, entry] : located) {
      const HptNode& n = *entry.second;
      if (n.kind != NodeKind::patricia) continue;

      if (!n.is_key2_node() && !n.key2.empty())
        fail("key2", label, "only key2 nodes may store key2 values");
      if (n.key2.size() > n.key2_capacity()) fail("key2", label, "slot capacity exceeded");
      if (n.is_key2_node() && !n.is_root() && n.key2_has_free_slot())
        fail("key2", label, "inner key2 node left unfilled");

      for (const auto& slot : n.key2) {
        auto target = located.find(slot);
        const HptNode* leaf =
            target == located.end() ? nullptr : target->second.second;
        if (!leaf || leaf->kind != NodeKind::patricia || !leaf->is_leaf())
          fail("key2", label, "slot does not name a leaf");
        else if (!label.is_prefix_of(slot) || (slot == label && !n.is_root()))
          fail("key2", label, "slot must lie below the node");
        else if (leaf->r != label)
          fail("key2", label, "referenced leaf does not point back");
      }

      if (!n.is_leaf() && n.r) fail("r", label, "only leaf nodes store r");
      if (n.is_leaf()) {
        if (!n.r) {
          fail("r", label, "leaf lacks a back-reference");
        } else {
          auto owner = located.find(*n.r);
          const HptNode* w = owner == located.end() ? nullptr : owner->second.second;
          if (!w || !w->is_key2_node() || !w->key2_contains(label) ||
              !n.r->is_prefix_of(label))
            fail("r", label, "back-reference does not name an owning key2 node above");
        }
      }
    }
  }
};

}  // namespace

std::string LegalityReport::summary(std::size_t max_items) const {
  if (legal) return "legal";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < max_items; ++i)
    os << "\n  [" << violations[i].rule << "] " << (violations[i].label.empty() ? "<root>" : violations[i].label.str())
       << ": " << violations[i].detail;
  return os.str();
}

LegalityReport check_legal(SystemState& s, const std::set<BitLabel>& keys,
                           const IdealHpt* ideal) {
  IdealHpt local;
  if (!ideal) {
    local = build_ideal_hpt(keys);
    ideal = &local;
  }
  Checker c{s, *ideal, {}, {}};
  c.collect();
  c.check_node_sets(keys);
  c.check_placement();
  c.check_edges();
  c.check_key2();
  c.report.legal = c.report.violations.empty();
  c.report.counters = compute_phase_counters(s, keys);
  return c.report;
}

LegalityReport check_legal_strict(SystemState& s, const std::set<BitLabel>& keys,
                                  const IdealHpt* ideal) {
  LegalityReport r = check_legal(s, keys, ideal);
  if (r.legal && !strictly_quiescent(s)) {
    r.legal = false;
    r.violations.push_back({"quiescence", {}, "queued traffic would still mutate the structure"});
  }
  return r;
}

}  // namespace shpt
