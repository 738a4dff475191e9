#pragma once

// Network JSON, schema version 1:
//
// {
//   "version": 1,
//   "name": "case-n5-s42",
//   "seed": 42,                      // optional
//   "generator": "...",              // optional provenance
//   "buses": [
//     {"id": 1, "kind": "Slack", "p": 0.0, "q": 0.0, "vset": 1.02, "gs": 0.0, "bs": 0.0},
//     ...
//   ],
//   "branches": [
//     {"from": 1, "to": 2, "r": 0.03, "x": 0.1, "b": 0.005, "tau": 1.0, "theta_deg": 0.0},
//     ...
//   ]
// }
//
// Quantities are per unit on a 100 MVA base. "p"/"q" are net injections
// (negative for loads); "gs"/"bs" are bus shunt conductance/susceptance.
// Missing optional bus or branch fields take the defaults of Bus / Branch.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "flowroots/pfmodel.hpp"

namespace flowroots {

inline constexpr int kNetworkSchemaVersion = 1;

[[nodiscard]] nlohmann::json network_to_json(const Network& net);
/// Throws ModelError on schema problems, then validates the network.
[[nodiscard]] Network network_from_json(const nlohmann::json& j);

[[nodiscard]] Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace flowroots
