#include "shpt/ideal.hpp"

#include <algorithm>
#include <stdexcept>

#include "shpt/msd.hpp"

namespace shpt {

std::vector<BitLabel> IdealHpt::leaves() const {
  std::vector<BitLabel> out;
  for (const auto& p : patricia)
    if (is_leaf(p)) out.push_back(p);
  return out;
}

std::vector<BitLabel> IdealHpt::key2_nodes() const {
  std::vector<BitLabel> out;
  for (const auto& p : patricia) {
    auto it = children_of.find(p);
    std::size_t n = it == children_of.end() ? 0 : it->second.size();
    if (n == 2 || p.empty()) out.push_back(p);
  }
  return out;
}

IdealHpt build_ideal_hpt(const std::set<BitLabel>& keys) {
  if (keys.empty()) throw std::invalid_argument("build_ideal_hpt: empty key set");

  IdealHpt t;
  t.patricia.insert(BitLabel{});
  for (const auto& k : keys) t.patricia.insert(k);
  for (auto a = keys.begin(); a != keys.end(); ++a)
    for (auto b = std::next(a); b != keys.end(); ++b)
      t.patricia.insert(lcp(*a, *b));

  // Parent = longest proper prefix present in the set.
  for (const auto& p : t.patricia) {
    if (p.empty()) continue;
    BitLabel best;
    bool found = false;
    for (const auto& q : t.patricia) {
      if (q.is_proper_prefix_of(p) && (!found || q.size() > best.size())) {
        best = q;
        found = true;
      }
    }
    t.parent_of.emplace(p, best);
    t.children_of[best].push_back(p);
  }
  for (auto& [_, cs] : t.children_of) std::sort(cs.begin(), cs.end());

  for (const auto& [child, parent] : t.parent_of) {
    if (auto m = msd_label(parent, child)) {
      t.msd.insert(*m);
      t.msd_between.emplace(child, *m);
    }
  }

  // Key2 matching: longest leaves first, deepest eligible ancestor with a
  // free slot wins. The root counts as eligible for itself.
  auto leaves = t.leaves();
  std::sort(leaves.begin(), leaves.end(), [](const BitLabel& a, const BitLabel& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  auto capacity = [](const BitLabel& l) -> std::size_t { return l.empty() ? 2 : 1; };
  std::vector<BitLabel> eligible = t.key2_nodes();
  for (const auto& leaf : leaves) {
    const BitLabel* best = nullptr;
    for (const auto& w : eligible) {
      if (!w.is_prefix_of(leaf)) continue;
      if (w == leaf && !leaf.empty()) continue;  // only the root may self-hold
      if (t.key2_assignment[w].size() >= capacity(w)) continue;
      if (!best || w.size() > best->size()) best = &w;
    }
    if (!best) throw std::logic_error("build_ideal_hpt: no slot for leaf (matching broke)");
    t.key2_assignment[*best].push_back(leaf);
    t.r_of.emplace(leaf, *best);
  }
  for (auto it = t.key2_assignment.begin(); it != t.key2_assignment.end();)
    it = it->second.empty() ? t.key2_assignment.erase(it) : std::next(it);
  return t;
}

}  // namespace shpt
