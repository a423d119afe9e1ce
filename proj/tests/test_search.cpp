#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>

#include "shpt/corruption.hpp"
#include "shpt/rng.hpp"
#include "shpt/runner.hpp"
#include "shpt/search.hpp"

using namespace shpt;

namespace {
BitLabel L(const char* s) { return *BitLabel::parse(s); }

std::set<BitLabel> keyset(std::initializer_list<const char*> ks) {
  std::set<BitLabel> out;
  for (const char* k : ks) out.insert(L(k));
  return out;
}

SystemState legal_state(const std::set<BitLabel>& keys, std::uint64_t seed = 7,
                        std::size_t peers = 4) {
  return generate_initial_state(keys, CorruptionScript::level("none", 1), peers, seed);
}

int max_lcp_over_keys(const BitLabel& x, const std::set<BitLabel>& keys) {
  int best = -1;
  for (const auto& k : keys) best = std::max(best, lcp(x, k).size());
  return best;
}

int read_budget(const BitLabel& x) {
  unsigned n = std::max(static_cast<unsigned>(x.size()), 2u);
  return static_cast<int>(std::bit_width(n)) - 1 + 5;
}

// every label of the given length, for exhaustive query sweeps
void for_all_labels(int max_len, auto&& fn) {
  for (int len = 0; len <= max_len; ++len)
    for (std::uint64_t bits = 0; bits < (1ull << len); ++bits)
      fn(BitLabel::from_bits(bits, len));
}
}  // namespace

TEST_CASE("binary prefix search on the three-key fixture") {
  auto keys = keyset({"0010", "0011", "0110"});
  SystemState s = legal_state(keys);

  auto r = binary_prefix_search(s, L("0011"));
  REQUIRE(r.has_value());
  CHECK(r->label == L("001"));  // deepest proper prefix node

  r = binary_prefix_search(s, L("1"));
  REQUIRE(r.has_value());
  CHECK(r->label == L(""));  // only the root is above

  SystemState empty(3, 2);
  CHECK(!binary_prefix_search(empty, L("0110")).has_value());
  CHECK(!binary_prefix_search(empty, L("")).has_value());
}

TEST_CASE("binary prefix search returns patricia prefixes only") {
  auto keys = keyset({"0010", "0011", "0110"});
  SystemState s = legal_state(keys);
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    BitLabel x = rng.label(0, 20);
    auto r = binary_prefix_search(s, x);
    if (!r) continue;
    CHECK(r->kind == NodeKind::patricia);
    CHECK(r->label.is_proper_prefix_of(x));
  }
}

TEST_CASE("prefix search fixtures") {
  auto keys = keyset({"0010", "0011", "0110"});
  SystemState s = legal_state(keys);
  CHECK(prefix_search(s, L("0111")) == L("0110"));
  CHECK(prefix_search(s, L("0011")) == L("0011"));  // exact key hit

  auto keys2 = keyset({"00", "01", "1"});
  SystemState s2 = legal_state(keys2);
  CHECK(prefix_search(s2, L("1111")) == L("1"));
}

TEST_CASE("prefix search matches the brute-force oracle exhaustively") {
  std::vector<std::set<BitLabel>> tries = {
      keyset({"0010", "0011", "0110"}), keyset({"00", "01", "1"}), keyset({"1011"}),
      keyset({""}), keyset({"0", "01", "011"}),  // keys prefixing each other
  };
  Rng rng(1234);
  for (int i = 0; i < 40; ++i) {
    std::set<BitLabel> keys;
    int n = rng.range(1, 6);
    while (static_cast<int>(keys.size()) < n) keys.insert(rng.label(1, 6));
    tries.push_back(keys);
  }

  for (const auto& keys : tries) {
    SystemState s = legal_state(keys, 21);
    for_all_labels(8, [&](const BitLabel& x) {
      std::uint64_t reads0 = s.metrics().dht_reads;
      auto got = prefix_search(s, x);
      auto reads = static_cast<int>(s.metrics().dht_reads - reads0);
      REQUIRE(got.has_value());
      CHECK(lcp(x, *got).size() == max_lcp_over_keys(x, keys));
      CHECK(reads <= read_budget(x));
    });
  }
}

TEST_CASE("read bound over every chain-length structure up to 16") {
  // Keys that are prefixes of one another produce the worst probe pattern:
  // runs of consecutive lengths carry no auxiliary nodes, so the descent
  // walk pays for them. Enumerate every chain shape over lengths 1..16 and
  // pin the budget.
  BitLabel pattern = L("1011001110001011");
  BitLabel x = concat(pattern, L("10110100"));  // 24 bits, extends the chain
  for (std::uint64_t mask = 1; mask < (1u << 16); ++mask) {
    std::set<BitLabel> keys;
    for (int bit = 0; bit < 16; ++bit)
      if (mask & (1u << bit)) keys.insert(pattern.prefix(bit + 1));
    SystemState s = legal_state(keys, 5, 1);

    std::uint64_t reads0 = s.metrics().dht_reads;
    auto got = prefix_search(s, x);
    auto reads = static_cast<int>(s.metrics().dht_reads - reads0);
    REQUIRE(got.has_value());
    CHECK(lcp(x, *got).size() == max_lcp_over_keys(x, keys));
    CHECK(reads <= read_budget(x));

    reads0 = s.metrics().dht_reads;
    auto deepest = binary_prefix_search(s, x);
    REQUIRE(deepest.has_value());
    // the deepest key is a proper prefix of x, so it is the answer here
    CHECK(deepest->label == *keys.rbegin());
  }
}

TEST_CASE("insert_key integrates into a converged trie") {
  auto keys = keyset({"0010", "0011", "0110"});
  SystemState s = legal_state(keys);
  REQUIRE(settle_quiescent(s, keys, 20));

  CHECK(insert_key(s, L("0111")) == KeyOpVerdict::applied);
  auto grown = keys;
  grown.insert(L("0111"));
  auto stats = run_until_legal(s, grown, 2000);
  CHECK(stats.converged);
  CHECK(s.dht_search(L("011")).has_value());  // the new fork
  CHECK(s.dht_search(L("0111"))->key == L("0111"));

  // double insert is a no-op
  CHECK(insert_key(s, L("0111")) == KeyOpVerdict::noop);
}

TEST_CASE("insert_key into an empty system bootstraps everything") {
  SystemState s(17, 4);
  CHECK(insert_key(s, L("1010")) == KeyOpVerdict::applied);
  auto stats = run_until_legal(s, keyset({"1010"}), 2000);
  CHECK(stats.converged);
}

TEST_CASE("delete_key in constant accesses, then the trie shrinks back") {
  auto keys = keyset({"0010", "0011", "0110"});
  SystemState s = legal_state(keys);
  REQUIRE(settle_quiescent(s, keys, 20));

  std::uint64_t a0 = s.metrics().dht_reads + s.metrics().dht_writes;
  CHECK(delete_key(s, L("0011")) == KeyOpVerdict::applied);
  CHECK(s.metrics().dht_reads + s.metrics().dht_writes - a0 <= 3);

  auto shrunk = keyset({"0010", "0110"});
  auto stats = run_until_legal(s, shrunk, 2000);
  CHECK(stats.converged);
  CHECK(!s.dht_search(L("001")).has_value());  // fork removed
  CHECK(!s.dht_search(L("00")).has_value());   // auxiliary node recomputed away

  // deleting something absent changes nothing
  auto fp = s.structure_fingerprint();
  CHECK(delete_key(s, L("0011")) == KeyOpVerdict::noop);
  CHECK(s.structure_fingerprint() == fp);
}
