#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "rai/sim/world.hpp"

namespace rai::sim {

// World description:
// {
//   "name": text,
//   "bounds": [x0, y0, x1, y1],
//   "walls": [[x0, y0, x1, y1], ...],
//   "robot": {"x", "y", "heading"},
//   "objects": [{"id", "label", "x", "y", "hx", "hy", "height",
//                "supported_by"?, "kind"?}],
//   "regions": {name: [x0, y0, x1, y1]},
//   "routes": {name: [[x, y], ...]},
//   "params": {"speed", "max_turn", "fov", "range", "vehicle_width", "lookahead"}
// }
// Supported objects take z from their support. Throws WorldError.
WorldState world_from_json(const nlohmann::json& doc);
WorldState load_world(const std::filesystem::path& path);

nlohmann::json to_json(const WorldState& state);
nlohmann::json to_json(const WorldObject& object);
// Compact view for the operator console: tick, robot pose, object markers.
nlohmann::json snapshot(const WorldState& state);

}  // namespace rai::sim
