#include "rai/sim/manipulation.hpp"

#include <algorithm>

namespace rai::sim {

using nlohmann::json;

std::string_view to_string(ManipError error) {
  switch (error) {
    case ManipError::kAlreadyHolding: return "ALREADY_HOLDING";
    case ManipError::kNotFound: return "NOT_FOUND";
    case ManipError::kTopOccupied: return "TOP_OCCUPIED";
    case ManipError::kOverlap: return "OVERLAP";
    case ManipError::kNothingHeld: return "NOTHING_HELD";
    case ManipError::kOutOfBounds: return "OUT_OF_BOUNDS";
  }
  return "?";
}

namespace {

ManipResult fail(ManipError e, std::string message) { return {e, std::move(message)}; }

const WorldObject* resting_on(const World& world, const std::string& id) {
  for (const auto& o : world.state().objects) {
    if (o.supported_by == id) return &o;
  }
  return nullptr;
}

// The first object or wall the candidate's volume would intersect.
std::optional<std::string> collision(const World& world, const WorldObject& candidate) {
  const Box fp = candidate.footprint();
  for (const auto& o : world.state().objects) {
    if (fp.overlaps(o.footprint()) && candidate.z < o.top() && o.z < candidate.top()) return o.id;
  }
  for (std::size_t i = 0; i < world.state().walls.size(); ++i) {
    if (fp.overlaps(world.state().walls[i])) return "wall " + std::to_string(i);
  }
  return std::nullopt;
}

ManipResult put_down(World& world, WorldObject placed) {
  if (auto hit = collision(world, placed)) {
    return fail(ManipError::kOverlap, placed.id + " would intersect " + *hit);
  }
  WorldState& s = world.mutable_state();
  s.objects.push_back(std::move(placed));
  s.held.reset();
  return {};
}

}  // namespace

ManipResult pick(World& world, const std::string& id) {
  WorldState& s = world.mutable_state();
  if (s.held) return fail(ManipError::kAlreadyHolding, "already holding " + s.held->id);
  auto it = std::find_if(s.objects.begin(), s.objects.end(), [&](const WorldObject& o) { return o.id == id; });
  if (it == s.objects.end()) return fail(ManipError::kNotFound, "no object " + id);
  if (const WorldObject* top = resting_on(world, id)) {
    return fail(ManipError::kTopOccupied, top->id + " rests on " + id);
  }
  WorldObject taken = *it;
  taken.supported_by.clear();
  s.objects.erase(it);
  s.held = std::move(taken);
  return {};
}

ManipResult place_at(World& world, double x, double y) {
  const WorldState& s = world.state();
  if (!s.held) return fail(ManipError::kNothingHeld, "nothing held");
  WorldObject placed = *s.held;
  placed.pose.x = x;
  placed.pose.y = y;
  placed.z = 0.0;
  placed.supported_by.clear();
  const Box fp = placed.footprint();
  if (fp.min.x < s.bounds.min.x || fp.min.y < s.bounds.min.y || fp.max.x > s.bounds.max.x ||
      fp.max.y > s.bounds.max.y) {
    return fail(ManipError::kOutOfBounds, placed.id + " would leave the workspace");
  }
  return put_down(world, std::move(placed));
}

ManipResult place_on(World& world, const std::string& target) {
  const WorldState& s = world.state();
  if (!s.held) return fail(ManipError::kNothingHeld, "nothing held");
  const WorldObject* base = world.find(target);
  if (base == nullptr) return fail(ManipError::kNotFound, "no object " + target);
  if (const WorldObject* top = resting_on(world, target)) {
    return fail(ManipError::kTopOccupied, top->id + " already rests on " + target);
  }
  WorldObject placed = *s.held;
  placed.pose.x = base->pose.x;
  placed.pose.y = base->pose.y;
  placed.z = base->top();
  placed.supported_by = base->id;
  return put_down(world, std::move(placed));
}

json handle_manip_request(World& world, const json& request) {
  ManipResult result;
  std::string op;
  std::string subject;
  if (!request.is_object()) {
    return {{"ok", false}, {"error", "BAD_REQUEST"}, {"message", "request must be an object"}};
  }
  if (request.contains("pick") && request["pick"].is_string()) {
    op = "pick";
    subject = request["pick"].get<std::string>();
    result = pick(world, subject);
  } else if (request.contains("place_on") && request["place_on"].is_string()) {
    op = "place_on";
    subject = world.state().held ? world.state().held->id : "";
    result = place_on(world, request["place_on"].get<std::string>());
  } else if (request.contains("place_at") && request["place_at"].is_object() &&
             request["place_at"].contains("x") && request["place_at"]["x"].is_number() &&
             request["place_at"].contains("y") && request["place_at"]["y"].is_number()) {
    op = "place_at";
    subject = world.state().held ? world.state().held->id : "";
    result = place_at(world, request["place_at"]["x"].get<double>(), request["place_at"]["y"].get<double>());
  } else {
    return {{"ok", false}, {"error", "BAD_REQUEST"}, {"message", "expected pick, place_at or place_on"}};
  }
  json event = {{"op", op}, {"request", request}, {"object", subject}, {"ok", result.ok()}};
  if (!result.ok()) {
    event["error"] = to_string(*result.error);
    world.record("manip_error", event);
    return {{"ok", false}, {"error", to_string(*result.error)}, {"message", result.message}};
  }
  world.record("manip", event);
  json reply = {{"ok", true}, {"op", op}, {"object", subject}};
  if (op != "pick") {
    const WorldObject* o = world.find(subject);
    reply["pose"] = {{"x", o->pose.x}, {"y", o->pose.y}, {"z", o->z}};
    reply["supported_by"] = o->supported_by;
  }
  return reply;
}

}  // namespace rai::sim
