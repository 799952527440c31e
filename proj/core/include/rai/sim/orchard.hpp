#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/sim/world.hpp"

namespace rai::sim {

struct ObstacleKind {
  std::string name;
  double hx;
  double hy;
  double height;
  bool traversable;
};

// branch, rock, crate, person. Only branch is traversable.
const std::vector<ObstacleKind>& obstacle_kinds();
// Throws WorldError for an unknown kind.
const ObstacleKind& obstacle_kind(const std::string& name);

// Places an obstacle of `kind` on segment `segment` of route `route`, at
// `fraction` of the way along it. Returns the new object's id.
std::string spawn_obstacle(World& world, const std::string& kind, const std::string& route, std::size_t segment,
                           double fraction, const std::string& id = {});

inline constexpr double kDetourMargin = 0.5;
// Extra keep-out used when planning, so a robot that stops anywhere within the
// navigation tolerance of a corner still keeps kDetourMargin.
inline constexpr double kDetourPad = 0.25;

// The first unresolved obstacle intersecting the lookahead corridor (a
// rectangle lookahead long and vehicle_width wide, starting at the robot and
// pointing along its heading), nearest first.
const WorldObject* corridor_obstacle(const WorldState& state);

// Shortest path from `from` to `to` around `obstacle` inflated by
// kDetourMargin + kDetourPad, over the inflated box's corners. Excludes `from`, ends with
// `to`. Throws WorldError if no path stays inside the world bounds.
std::vector<Vec2> detour(const WorldState& state, Vec2 from, Vec2 to, const WorldObject& obstacle);

// Minimum distance between the polyline and the box.
double path_clearance(const std::vector<Vec2>& path, const Box& box);

// The five resolutions an anomaly can end with.
inline const std::vector<std::string>& resolution_names() {
  static const std::vector<std::string> names{"replan_route", "drive_forward", "flash_signal", "sound_signal",
                                              "abort_task"};
  return names;
}

// Applies a resolution to an obstacle. Request: {"obstacle": id, "action":
// name} plus, for replan_route, either "target": {"x", "y"} or "route": the
// remaining waypoints, of which the first outside the keep-out area becomes
// the target. Reply: {"ok": bool, ...}; replan_route adds "waypoints",
// "clearance" and, given a route, "rejoin" (index of the target in it).
// drive_forward over a non-traversable obstacle records a safety violation
// and halts the world.
nlohmann::json resolve_anomaly(World& world, const nlohmann::json& request);

}  // namespace rai::sim
