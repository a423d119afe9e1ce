#include "shpt/search.hpp"

#include <bit>
#include <vector>

#include "shpt/msd.hpp"

namespace shpt {
namespace {

/// Shared probe phase. Walks candidate lengths MSB-first, keeping a bit of
/// the running length whenever the corresponding prefix of x is stored.
/// Accepted msd hits steer the length but cannot be the answer. The probe
/// loop can land short of the deepest prefix node: consecutive label
/// lengths never carry an auxiliary node (the length calculation collapses
/// onto the longer label for every carry), so a short descent follows: an
/// msd landing hops to the Patricia node its child edge names, then the
/// walk tracks Patricia child edges toward x while they stay prefixes.
std::optional<HptNode> probe_phase(SystemState& s, const BitLabel& x, bool include_full) {
  int max_len = include_full ? x.size() : x.size() - 1;
  if (max_len < 0) return std::nullopt;

  auto acceptable = [&](const BitLabel& l) {
    return include_full ? l.is_prefix_of(x) : l.is_proper_prefix_of(x);
  };

  std::optional<HptNode> best_pat;
  std::optional<HptNode> deepest;
  int len = 0;
  if (max_len >= 1) {
    for (int i = std::bit_width(static_cast<unsigned>(max_len)) - 1; i >= 0; --i) {
      int t = len | (1 << i);
      if (t > max_len) continue;
      auto hit = s.dht_search(x.prefix(t));
      if (!hit || !acceptable(hit->label)) continue;
      len = t;
      deepest = hit;
      if (hit->kind == NodeKind::patricia) best_pat = hit;
    }
  }

  if (deepest && deepest->kind == NodeKind::msd) {
    bool hopped = false;
    if (auto ce = deepest->msd_child_edge()) {
      if (deepest->label.size() + ce->size() <= BitLabel::kMaxBits) {
        BitLabel child = concat(deepest->label, *ce);
        if (acceptable(child)) {
          auto c = s.dht_search(child);
          if (c && c->kind == NodeKind::patricia) {
            best_pat = c;
            hopped = true;
          }
        }
      }
    }
    if (!hopped) {
      if (auto par = deepest->parent_label()) {
        if (best_pat && best_pat->label == *par) {
          // already have the adjacent Patricia node
        } else {
          auto p = s.dht_search(*par);
          if (p && p->kind == NodeKind::patricia && acceptable(p->label)) best_pat = p;
        }
      }
    }
  }

  if (!best_pat) {
    // Nothing usable was hit; the root is the last candidate and doubles as
    // the existence check root creation keys off.
    auto root = s.dht_search(BitLabel{});
    if (root && root->kind == NodeKind::patricia && acceptable(root->label)) best_pat = root;
    if (!best_pat) return std::nullopt;
  }

  // Descent along Patricia child edges.
  while (best_pat->label.size() < x.size()) {
    const auto& edge = best_pat->child(x.bit(best_pat->label.size()));
    if (!edge || edge->empty() ||
        best_pat->label.size() + edge->size() > BitLabel::kMaxBits)
      break;
    BitLabel next = concat(best_pat->label, *edge);
    if (!acceptable(next)) break;
    auto c = s.dht_search(next);
    if (!c || c->kind != NodeKind::patricia) break;
    best_pat = c;
  }
  return best_pat;
}

}  // namespace

std::optional<HptNode> binary_prefix_search(SystemState& s, const BitLabel& x) {
  return probe_phase(s, x, /*include_full=*/false);
}

std::optional<BitLabel> prefix_search(SystemState& s, const BitLabel& x) {
  auto u = probe_phase(s, x, /*include_full=*/true);
  if (!u) return std::nullopt;

  std::vector<BitLabel> candidates;
  if (u->key) candidates.push_back(*u->key);
  for (const auto& slot : u->key2) candidates.push_back(slot);
  if (u->label.size() < x.size()) {
    const auto& edge = u->child(x.bit(u->label.size()));
    if (edge && !edge->empty() && u->label.size() + edge->size() <= BitLabel::kMaxBits) {
      if (auto c = s.dht_search(concat(u->label, *edge)); c && c->kind == NodeKind::patricia) {
        if (c->key) candidates.push_back(*c->key);
        for (const auto& slot : c->key2) candidates.push_back(slot);
      }
    }
  }

  std::optional<BitLabel> best;
  int best_len = -1;
  for (const auto& cand : candidates) {
    int l = lcp(x, cand).size();
    if (l > best_len) {
      best_len = l;
      best = cand;
    }
  }
  return best;
}

KeyOpVerdict insert_key(SystemState& s, const BitLabel& k) {
  HptNode v;
  v.label = k;
  v.key = k;
  if (auto w = binary_prefix_search(s, k)) v.parent_edge = k.suffix_from(w->label.size());
  auto verdict = s.dht_insert(v);
  if (verdict == InsertVerdict::rejected)
    throw std::logic_error("insert_key: label occupied by a different key");
  s.note_creation(k, "key");
  return verdict == InsertVerdict::stored ? KeyOpVerdict::applied : KeyOpVerdict::noop;
}

KeyOpVerdict delete_key(SystemState& s, const BitLabel& k) {
  auto v = s.dht_search(k);
  if (!v || v->kind != NodeKind::patricia || !v->key || *v->key != k) return KeyOpVerdict::noop;
  s.update_node(k, [](HptNode& n) {
    n.key.reset();
    return true;
  });
  return KeyOpVerdict::applied;
}

}  // namespace shpt
