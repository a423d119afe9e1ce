#include "shpt/state_io.hpp"

#include <stdexcept>

namespace shpt {

using nlohmann::json;

namespace {

json label_json(const BitLabel& l) { return l.str(); }
json opt_json(const std::optional<BitLabel>& l) { return l ? json(l->str()) : json(nullptr); }

BitLabel label_from(const json& j) {
  auto l = BitLabel::parse(j.get<std::string>());
  if (!l) throw std::invalid_argument("bad label in dump: " + j.dump());
  return *l;
}
std::optional<BitLabel> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return label_from(j);
}

const char* kind_name(NodeKind k) { return k == NodeKind::msd ? "msd" : "patricia"; }
const char* msg_name(MsgKind k) {
  switch (k) {
    case MsgKind::linearize: return "linearize";
    case MsgKind::key2_probe: return "key2-probe";
    case MsgKind::leaf_present: return "leaf-present";
  }
  return "?";
}

json node_json(const HptNode& n) {
  json slots = json::array();
  for (const auto& s : n.key2) slots.push_back(s.str());
  return {{"label", label_json(n.label)}, {"kind", kind_name(n.kind)},
          {"parent_edge", opt_json(n.parent_edge)}, {"child0", opt_json(n.child0)},
          {"child1", opt_json(n.child1)},           {"key", opt_json(n.key)},
          {"key2", slots},                          {"r", opt_json(n.r)}};
}

HptNode node_from(const json& j) {
  HptNode n;
  n.label = label_from(j.at("label"));
  n.kind = j.at("kind").get<std::string>() == "msd" ? NodeKind::msd : NodeKind::patricia;
  n.parent_edge = opt_from(j.at("parent_edge"));
  n.child0 = opt_from(j.at("child0"));
  n.child1 = opt_from(j.at("child1"));
  n.key = opt_from(j.at("key"));
  for (const auto& s : j.at("key2")) n.key2.push_back(label_from(s));
  n.r = opt_from(j.at("r"));
  return n;
}

json message_json(const Message& m) {
  return {{"kind", msg_name(m.kind)},
          {"target", label_json(m.target)},
          {"payload", label_json(m.payload)},
          {"hops_left", m.hops_left}};
}

Message message_from(const json& j) {
  Message m;
  auto k = j.at("kind").get<std::string>();
  if (k == "linearize") m.kind = MsgKind::linearize;
  else if (k == "key2-probe") m.kind = MsgKind::key2_probe;
  else if (k == "leaf-present") m.kind = MsgKind::leaf_present;
  else throw std::invalid_argument("bad message kind: " + k);
  m.target = label_from(j.at("target"));
  m.payload = label_from(j.at("payload"));
  m.hops_left = j.at("hops_left").get<int>();
  return m;
}

}  // namespace

json state_to_json(const SystemState& s, std::size_t) {
  json peers = json::array();
  for (std::size_t i = 0; i < s.num_peers(); ++i) {
    const Peer& p = s.peer(i);
    json nodes = json::array();
    for (const auto& [_, n] : p.store) nodes.push_back(node_json(n));
    json loose = json::array();
    for (const auto& k : p.loose_keys) loose.push_back(k.str());
    json channel = json::array();
    for (const auto& m : p.channel) channel.push_back(message_json(m));
    peers.push_back({{"nodes", nodes},
                     {"loose_keys", loose},
                     {"channel", channel},
                     {"cursor", opt_json(p.timeout_cursor)}});
  }
  return {{"format", kStateFormatTag},
          {"seed", s.seed()},
          {"round", s.round()},
          {"peers", peers}};
}

SystemState state_from_json(const json& j) {
  if (j.at("format").get<std::string>() != kStateFormatTag)
    throw std::invalid_argument("unsupported state format tag");
  auto seed = j.at("seed").get<std::uint64_t>();
  const auto& peers = j.at("peers");
  SystemState s(seed, peers.size());
  for (std::size_t i = 0; i < peers.size(); ++i) {
    Peer& p = s.peer(i);
    for (const auto& nj : peers[i].at("nodes")) {
      HptNode n = node_from(nj);
      p.store[n.label] = n;
    }
    for (const auto& kj : peers[i].at("loose_keys")) p.loose_keys.insert(label_from(kj));
    for (const auto& mj : peers[i].at("channel")) p.channel.push_back(message_from(mj));
    if (peers[i].contains("cursor")) p.timeout_cursor = opt_from(peers[i].at("cursor"));
  }
  s.set_round(j.value("round", std::uint64_t{0}));
  for (const auto& k : s.collect_keys()) s.metrics().d_bits += static_cast<std::uint64_t>(k.size());
  return s;
}

json metrics_to_json(std::uint64_t seed, std::size_t num_keys, const SystemState& s,
                     const RunStats& run, const ClosureStats* window) {
  std::size_t patricia = 0, msd = 0;
  std::uint64_t label_bits = 0;
  for (std::size_t i = 0; i < s.num_peers(); ++i)
    for (const auto& [_, n] : s.peer(i).store) {
      (n.kind == NodeKind::msd ? msd : patricia) += 1;
      label_bits += static_cast<std::uint64_t>(n.label.size());
    }

  json series = json::object();
  for (std::size_t c = 0; c < PhaseCounters::kCount; ++c) {
    json arr = json::array();
    for (const auto& pc : run.series) arr.push_back(pc.values()[c]);
    series[std::string(PhaseCounters::kNames[c])] = arr;
  }

  json out = {{"seed", seed},
              {"num_keys", num_keys},
              {"d_bits", s.metrics().d_bits},
              {"rounds_to_legal", run.converged ? json(run.rounds_used) : json(nullptr)},
              {"max_reads_per_timeout",
               window ? window->max_reads_per_timeout : run.max_reads_per_timeout},
              {"max_msgs_per_timeout",
               window ? window->max_msgs_per_timeout : run.max_msgs_per_timeout},
              {"total_nodes", patricia + msd},
              {"patricia_nodes", patricia},
              {"msd_nodes", msd},
              {"sum_label_bits", label_bits},
              {"phase_counters", series},
              {"converged", run.converged}};
  return out;
}

}  // namespace shpt
