#pragma once

// Network description files.
//
//   {
//     "assumption": "A1" | "A2",
//     "common_random_input": {"low": l, "high": h},          (optional)
//     "vertices": [{"id": 1, "agent": <attachment>, "w": 0.0, "class": "label"}, ...],
//     "edges":    [{"id": 1, "head": 2, "tail": 1, "controller": <attachment>, "class": "label"}, ...]
//   }
//
// An attachment is a relation literal
//   {"vertices": [[u, y], ...], "left_tail": "vertical" | "horizontal" | {"slope": s}, "right_tail": ...}
//   {"affine": {"a": s, "b": t}}
//   {"named": "identity"}
// or a model reference {"model": "upsilon2", "params": {...}}.
// "w" and "class" are optional; ids run over 1..n and 1..m; unknown fields
// are rejected.

#include "clustersym/network.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace clustersym {

nlohmann::json relation_to_json(const MonotoneRelation& r);

/// Throws ParseError, NonMonotoneInput, InvalidRelation.
MonotoneRelation relation_from_json(const nlohmann::json& j);

/// Relation literal or model reference.
Attachment attachment_from_json(const nlohmann::json& j);

/// The common random input, when declared, is drawn from seed and added to
/// every w_i.
Network parse_network(const nlohmann::json& j, std::uint64_t seed = 0);

/// Reads and parses a file; throws ParseError on I/O or syntax problems.
Network load_network(const std::filesystem::path& path, std::uint64_t seed = 0);

/// Inverse of parse_network (declared w and random range, not the drawn value).
nlohmann::json network_to_json(const Network& net);

/// Two-space indented JSON with a trailing newline.
std::string serialize_network(const Network& net);

/// Deterministic uniform draw in [low, high) used for common random inputs.
double draw_common_input(const CommonRandomInput& range, std::uint64_t seed);

}  // namespace clustersym
