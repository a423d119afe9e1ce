#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "shpt/ideal.hpp"
#include "shpt/rng.hpp"

using namespace shpt;

namespace {
BitLabel L(const char* s) { return *BitLabel::parse(s); }

std::set<BitLabel> keyset(std::initializer_list<const char*> ks) {
  std::set<BitLabel> out;
  for (const char* k : ks) out.insert(L(k));
  return out;
}

std::set<BitLabel> random_keys(Rng& rng, int count, int max_len) {
  std::set<BitLabel> keys;
  while (static_cast<int>(keys.size()) < count) keys.insert(rng.label(1, max_len));
  return keys;
}

// A matching is valid when every leaf is assigned exactly once to a node
// above it, capacities hold, and no non-root node is left empty.
void check_matching(const IdealHpt& t) {
  std::map<BitLabel, int> assigned;
  for (const auto& [w, leaves] : t.key2_assignment) {
    CHECK((w.empty() ? leaves.size() <= 2 : leaves.size() <= 1));
    for (const auto& leaf : leaves) {
      CHECK(w.is_prefix_of(leaf));
      CHECK(t.is_leaf(leaf));
      CHECK(t.r_of.at(leaf) == w);
      assigned[leaf] += 1;
    }
  }
  for (const auto& leaf : t.leaves()) CHECK(assigned[leaf] == 1);
  for (const auto& w : t.key2_nodes()) {
    if (w.empty()) continue;
    auto it = t.key2_assignment.find(w);
    CHECK((it != t.key2_assignment.end() && it->second.size() == 1));
  }
}

}  // namespace

TEST_CASE("three-key fixture") {
  auto t = build_ideal_hpt(keyset({"0010", "0011", "0110"}));
  CHECK(t.patricia == std::set<BitLabel>{L(""), L("0"), L("001"), L("0010"), L("0011"), L("0110")});
  CHECK(t.msd == std::set<BitLabel>{L("00")});
  CHECK(t.leaves().size() == 3);
  CHECK(t.key2_nodes() == std::vector<BitLabel>{L(""), L("0"), L("001")});
  check_matching(t);
  // the deterministic assignment rule fills deepest-first
  CHECK(t.key2_assignment.at(L("001")) == std::vector<BitLabel>{L("0010")});
  CHECK(t.key2_assignment.at(L("0")) == std::vector<BitLabel>{L("0011")});
  CHECK(t.key2_assignment.at(L("")) == std::vector<BitLabel>{L("0110")});
}

TEST_CASE("root with two children stores two values") {
  auto t = build_ideal_hpt(keyset({"00", "01", "1"}));
  CHECK(t.patricia == std::set<BitLabel>{L(""), L("0"), L("00"), L("01"), L("1")});
  CHECK(t.msd.empty());
  CHECK(t.leaves().size() == 3);
  CHECK(t.key2_nodes().size() == 2);  // L = I + 1
  CHECK(t.key2_assignment.at(L("")).size() == 2);
  check_matching(t);
}

TEST_CASE("degenerate single-key tries") {
  auto t = build_ideal_hpt(keyset({"1011"}));
  CHECK(t.patricia == std::set<BitLabel>{L(""), L("1011")});
  CHECK(t.key2_assignment.at(L("")) == std::vector<BitLabel>{L("1011")});

  auto r = build_ideal_hpt(keyset({""}));  // the root itself is the key
  CHECK(r.patricia == std::set<BitLabel>{L("")});
  CHECK(r.key2_assignment.at(L("")) == std::vector<BitLabel>{L("")});
  CHECK(r.r_of.at(L("")) == L(""));

  CHECK_THROWS_AS(build_ideal_hpt({}), std::invalid_argument);
}

TEST_CASE("keys that prefix each other") {
  auto t = build_ideal_hpt(keyset({"0", "01", "011"}));
  CHECK(t.patricia == std::set<BitLabel>{L(""), L("0"), L("01"), L("011")});
  CHECK(t.leaves() == std::vector<BitLabel>{L("011")});
  check_matching(t);
}

TEST_CASE("structure properties over random key sets") {
  Rng rng(0xA7);
  for (int iter = 0; iter < 1000; ++iter) {
    auto keys = random_keys(rng, rng.range(1, 12), 12);
    auto t = build_ideal_hpt(keys);

    // node count bound and prefix-of-a-key property
    CHECK(t.patricia.size() <= 2 * keys.size());
    for (const auto& p : t.patricia) {
      bool covers = false;
      for (const auto& k : keys)
        if (p.is_prefix_of(k)) covers = true;
      CHECK(covers);
    }
    for (const auto& m : t.msd) {
      bool strictly_between = false;
      for (const auto& [child, lab] : t.msd_between)
        if (lab == m) {
          const auto& parent = t.parent_of.at(child);
          strictly_between = parent.is_proper_prefix_of(m) && m.is_proper_prefix_of(child);
        }
      CHECK(strictly_between);
    }

    // every inner node forks toward two sides unless it stores a key
    for (const auto& [p, cs] : t.children_of) {
      CHECK(cs.size() <= 2);
      if (cs.size() == 2) CHECK(cs[0].bit(p.size()) != cs[1].bit(p.size()));
      if (cs.size() == 1 && !p.empty()) CHECK(keys.count(p) == 1);
    }

    // leaf/key2 counting: I <= L <= I + 1, split by the root's child count
    std::size_t leaves = t.leaves().size();
    std::size_t inner = t.key2_nodes().size();
    CHECK(inner <= leaves);
    CHECK(leaves <= inner + 1);
    std::size_t root_children =
        t.children_of.count(L("")) ? t.children_of.at(L("")).size() : 0;
    if (root_children == 2) CHECK(leaves == inner + 1);
    if (root_children == 1) CHECK(leaves == inner);

    check_matching(t);
  }
}
