#pragma once

#include "shpt/bit_label.hpp"

namespace shpt {

enum class MsgKind {
  linearize,     // payload = presented label
  key2_probe,    // payload = origin key2 node pulling a value
  leaf_present,  // payload = origin leaf offering itself
};

struct Message {
  MsgKind kind = MsgKind::linearize;
  BitLabel target;   // trie node label this is addressed to
  BitLabel payload;
  int hops_left = 0;  // upward probes only; linearize does not expire

  friend bool operator==(const Message&, const Message&) = default;
};

}  // namespace shpt
