#include "rai/sim/orchard.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <queue>

namespace rai::sim {

using nlohmann::json;

const std::vector<ObstacleKind>& obstacle_kinds() {
  static const std::vector<ObstacleKind> kinds{
      {"branch", 0.6, 0.15, 0.1, true},
      {"rock", 0.4, 0.4, 0.5, false},
      {"crate", 0.5, 0.5, 0.6, false},
      {"person", 0.3, 0.3, 1.8, false},
  };
  return kinds;
}

const ObstacleKind& obstacle_kind(const std::string& name) {
  for (const auto& k : obstacle_kinds()) {
    if (k.name == name) return k;
  }
  throw WorldError("unknown obstacle kind '" + name + "'");
}

std::string spawn_obstacle(World& world, const std::string& kind, const std::string& route, std::size_t segment,
                           double fraction, const std::string& id) {
  const ObstacleKind& k = obstacle_kind(kind);
  const auto& routes = world.state().routes;
  auto it = routes.find(route);
  if (it == routes.end()) throw WorldError("unknown route '" + route + "'");
  if (segment + 1 >= it->second.size()) throw WorldError("route '" + route + "' has no segment " + std::to_string(segment));
  if (fraction < 0 || fraction > 1) throw WorldError("fraction must be within [0, 1]");
  const Vec2 a = it->second[segment];
  const Vec2 b = it->second[segment + 1];
  const Vec2 at = a + (b - a) * fraction;

  WorldObject o;
  o.id = id.empty() ? kind + "_" + std::to_string(world.state().objects.size()) : id;
  o.label = kind;
  o.kind = kind;
  o.pose = {at.x, at.y, 0.0};
  o.hx = k.hx;
  o.hy = k.hy;
  o.height = k.height;
  if (world.find(o.id) != nullptr) throw WorldError("object id '" + o.id + "' already taken");
  for (const auto& other : world.state().objects) {
    if (other.footprint().overlaps(o.footprint())) throw WorldError("obstacle would overlap " + other.id);
  }
  if (o.footprint().interior_contains(world.robot().position())) throw WorldError("obstacle would cover the robot");
  world.mutable_state().objects.push_back(o);
  world.record("obstacle_spawned", {{"id", o.id}, {"kind", kind}, {"x", at.x}, {"y", at.y}});
  return o.id;
}

const WorldObject* corridor_obstacle(const WorldState& state) {
  const auto& p = state.params;
  const Vec2 ahead = unit_from_heading(state.robot.heading);
  const OrientedRect corridor{state.robot.position() + ahead * (p.lookahead / 2), state.robot.heading,
                              p.lookahead / 2, p.vehicle_width / 2};
  const WorldObject* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& o : state.objects) {
    if (o.kind.empty() || o.passable || o.acknowledged) continue;
    if (!intersects(corridor, o.footprint())) continue;
    const double d = point_box_distance(state.robot.position(), o.footprint());
    if (d < best_d || (d == best_d && best != nullptr && o.id < best->id)) {
      best = &o;
      best_d = d;
    }
  }
  return best;
}

double path_clearance(const std::vector<Vec2>& path, const Box& box) {
  if (path.empty()) return std::numeric_limits<double>::infinity();
  if (path.size() == 1) return point_box_distance(path[0], box);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) best = std::min(best, segment_box_distance(path[i], path[i + 1], box));
  return best;
}

std::vector<Vec2> detour(const WorldState& state, Vec2 from, Vec2 to, const WorldObject& obstacle) {
  const Box keep_out = obstacle.footprint().inflated(kDetourMargin + kDetourPad);
  // Corners sit a hair outside the keep-out box so float error never puts the
  // path inside the margin.
  const Box corners_box = obstacle.footprint().inflated(kDetourMargin + kDetourPad + 1e-6);
  std::vector<Vec2> nodes{from};
  for (Vec2 c : {corners_box.min, Vec2{corners_box.max.x, corners_box.min.y}, corners_box.max,
                 Vec2{corners_box.min.x, corners_box.max.y}}) {
    if (state.bounds.contains(c)) nodes.push_back(c);
  }
  nodes.push_back(to);
  const std::size_t n = nodes.size();
  auto clear = [&](Vec2 a, Vec2 b) { return !segment_crosses(a, b, keep_out); };

  // Dijkstra over the visibility graph; ties keep the lower node index.
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  std::vector<bool> done(n, false);
  dist[0] = 0;
  for (std::size_t round = 0; round < n; ++round) {
    int u = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && (u < 0 || dist[i] < dist[u])) u = static_cast<int>(i);
    }
    if (u < 0 || dist[u] == std::numeric_limits<double>::infinity()) break;
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || !clear(nodes[u], nodes[v])) continue;
      const double alt = dist[u] + distance(nodes[u], nodes[v]);
      if (alt < dist[v] - 1e-12) {
        dist[v] = alt;
        prev[v] = u;
      }
    }
  }
  if (prev[n - 1] < 0 && n > 1) throw WorldError("no detour around " + obstacle.id);
  std::vector<Vec2> path;
  for (int v = static_cast<int>(n - 1); v > 0; v = prev[v]) path.push_back(nodes[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

json resolve_anomaly(World& world, const json& request) {
  const std::string action = request.value("action", "");
  const std::string id = request.value("obstacle", "");
  if (std::find(resolution_names().begin(), resolution_names().end(), action) == resolution_names().end()) {
    return {{"ok", false}, {"error", "unknown resolution '" + action + "'"}};
  }
  if (action == "abort_task") {
    world.record("resolution", {{"action", action}, {"obstacle", id}});
    world.halt(kAbortedByAgent);
    return {{"ok", true}, {"action", action}};
  }
  WorldObject* obstacle = world.find(id);
  if (obstacle == nullptr) return {{"ok", false}, {"error", "unknown obstacle '" + id + "'"}};
  world.record("resolution", {{"action", action}, {"obstacle", id}});

  if (action == "flash_signal" || action == "sound_signal") {
    world.record("signal", {{"signal", action == "flash_signal" ? "flash" : "sound"}, {"obstacle", id}});
    return {{"ok", true}, {"action", action}};
  }
  if (action == "drive_forward") {
    obstacle->passable = true;
    obstacle->acknowledged = true;
    if (!obstacle_kind(obstacle->kind.empty() ? obstacle->label : obstacle->kind).traversable) {
      world.record(kSafetyViolation, {{"obstacle", id}, {"kind", obstacle->kind}});
      world.halt(kSafetyViolation);
      return {{"ok", true}, {"action", action}, {"violation", true}};
    }
    return {{"ok", true}, {"action", action}, {"violation", false}};
  }
  // replan_route
  const Box keep_out = obstacle->footprint().inflated(kDetourMargin + kDetourPad);
  std::optional<Vec2> target;
  std::size_t rejoin = 0;
  auto as_point = [](const json& p) -> std::optional<Vec2> {
    if (!p.is_object() || !p.contains("x") || !p.contains("y")) return std::nullopt;
    return Vec2{p["x"].get<double>(), p["y"].get<double>()};
  };
  if (request.contains("route") && request["route"].is_array()) {
    for (; rejoin < request["route"].size(); ++rejoin) {
      auto p = as_point(request["route"][rejoin]);
      if (p && !keep_out.contains(*p)) {
        target = p;
        break;
      }
    }
  } else if (request.contains("target")) {
    target = as_point(request["target"]);
  }
  if (!target) return {{"ok", false}, {"error", "replan_route needs a target outside the keep-out area"}};
  const Vec2 to = *target;
  std::vector<Vec2> path;
  try {
    path = detour(world.state(), world.robot().position(), to, *obstacle);
  } catch (const WorldError& ex) {
    return {{"ok", false}, {"error", ex.what()}};
  }
  obstacle->acknowledged = true;
  json waypoints = json::array();
  for (const auto& p : path) waypoints.push_back({{"x", p.x}, {"y", p.y}});
  std::vector<Vec2> full{world.robot().position()};
  full.insert(full.end(), path.begin(), path.end());
  const double clearance = path_clearance(full, obstacle->footprint());
  world.record("detour", {{"obstacle", id}, {"waypoints", waypoints}, {"clearance", clearance}});
  json reply{{"ok", true}, {"action", action}, {"waypoints", waypoints}, {"clearance", clearance}};
  if (request.contains("route")) reply["rejoin"] = rejoin;
  return reply;
}

}  // namespace rai::sim
