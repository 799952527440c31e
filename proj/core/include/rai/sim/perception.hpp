#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/sim/world.hpp"

namespace rai::sim {

struct Detection {
  std::string id;
  std::string label;
  double distance = 0.0;
  // Degrees relative to the robot heading, in (-180, 180].
  double bearing = 0.0;
  double confidence = 0.0;
  // Range along the centre ray to where it meets the object's footprint.
  double depth = 0.0;
};

struct CameraObservation {
  std::int64_t tick = 0;
  std::vector<Detection> detections;
};

// Is `target` seen from the robot: inside the field of view and range, and
// the ray to its centre crosses no wall or other object outside its own
// stack?
bool is_visible(const WorldState& state, const WorldObject& target);

// Visible objects whose label contains any query (case-insensitive); all
// visible objects when `queries` is empty. Sorted by distance, then id.
CameraObservation observe(const WorldState& state, const std::vector<std::string>& queries = {});

nlohmann::json to_json(const Detection& d);
nlohmann::json to_json(const CameraObservation& obs);

}  // namespace rai::sim
