#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rai/sim/world.hpp"

namespace rai::sim {

enum class ManipError { kAlreadyHolding, kNotFound, kTopOccupied, kOverlap, kNothingHeld, kOutOfBounds };

std::string_view to_string(ManipError error);

struct ManipResult {
  std::optional<ManipError> error;
  std::string message;

  bool ok() const { return !error.has_value(); }
};

// Moves the object into the effector. Fails if something is already held,
// the object is missing, or something rests on it.
ManipResult pick(World& world, const std::string& id);
// Puts the held object down on the ground with its centre at (x, y).
ManipResult place_at(World& world, double x, double y);
// Puts the held object centred on top of `target`.
ManipResult place_on(World& world, const std::string& target);

// Dispatches a request document {"pick": id} | {"place_at": {"x", "y"}} |
// {"place_on": id}. Replies {"ok": true, ...} or {"ok": false, "error": CODE,
// "message": text}; every call is logged as a world event.
nlohmann::json handle_manip_request(World& world, const nlohmann::json& request);

}  // namespace rai::sim
