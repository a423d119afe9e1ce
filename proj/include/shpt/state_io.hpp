#pragma once

#include <string>

#include "json.hpp"
#include "shpt/runner.hpp"
#include "shpt/system.hpp"

namespace shpt {

inline constexpr const char* kStateFormatTag = "shpt-state-v1";

/// Full system dump: peers, stored nodes with all fields, loose keys and
/// pending messages. Round-trips through state_from_json.
nlohmann::json state_to_json(const SystemState& s, std::size_t num_peers_hint = 0);
SystemState state_from_json(const nlohmann::json& j);

/// The metrics document the CLI emits for one scenario.
nlohmann::json metrics_to_json(std::uint64_t seed, std::size_t num_keys, const SystemState& s,
                               const RunStats& run, const ClosureStats* window);

}  // namespace shpt
