#include "rai/sim/world_io.hpp"

#include <fstream>
#include <set>

namespace rai::sim {

using nlohmann::json;

namespace {

Box box_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw WorldError(what + " must be [x0, y0, x1, y1]");
  Box b{{j[0].get<double>(), j[1].get<double>()}, {j[2].get<double>(), j[3].get<double>()}};
  if (!(b.min.x < b.max.x && b.min.y < b.max.y)) throw WorldError(what + " is empty or inverted");
  return b;
}

json box_json(const Box& b) { return json::array({b.min.x, b.min.y, b.max.x, b.max.y}); }

}  // namespace

WorldState world_from_json(const json& doc) {
  WorldState s;
  try {
    s.name = doc.value("name", "world");
    s.bounds = box_from(doc.at("bounds"), "bounds");
    for (const auto& w : doc.value("walls", json::array())) s.walls.push_back(box_from(w, "wall"));
    const json& robot = doc.at("robot");
    s.robot = {robot.at("x").get<double>(), robot.at("y").get<double>(),
               normalize_heading(robot.value("heading", 0.0))};
    for (const auto& o : doc.value("objects", json::array())) {
      WorldObject obj;
      obj.id = o.at("id").get<std::string>();
      obj.label = o.value("label", obj.id);
      obj.pose = {o.at("x").get<double>(), o.at("y").get<double>(), normalize_heading(o.value("heading", 0.0))};
      obj.hx = o.value("hx", 0.5);
      obj.hy = o.value("hy", 0.5);
      obj.height = o.value("height", 1.0);
      obj.supported_by = o.value("supported_by", "");
      obj.kind = o.value("kind", "");
      s.objects.push_back(std::move(obj));
    }
    const json regions = doc.value("regions", json::object());
    for (const auto& [name, box] : regions.items()) {
      s.regions[name] = box_from(box, "region " + name);
    }
    const json routes = doc.value("routes", json::object());
    for (const auto& [name, pts] : routes.items()) {
      std::vector<Vec2> route;
      for (const auto& p : pts) route.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      if (route.empty()) throw WorldError("route " + name + " is empty");
      s.routes[name] = std::move(route);
    }
    if (doc.contains("params")) {
      const json& p = doc["params"];
      s.params.speed = p.value("speed", s.params.speed);
      s.params.max_turn = p.value("max_turn", s.params.max_turn);
      s.params.fov = p.value("fov", s.params.fov);
      s.params.range = p.value("range", s.params.range);
      s.params.vehicle_width = p.value("vehicle_width", s.params.vehicle_width);
      s.params.lookahead = p.value("lookahead", s.params.lookahead);
    }
  } catch (const json::exception& ex) {
    throw WorldError(std::string("world description: ") + ex.what());
  }

  // Resolve elevations bottom-up; a cycle or dangling support is left for
  // the invariant check to report.
  std::set<std::string> placed;
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& o : s.objects) {
      if (placed.count(o.id) != 0) continue;
      if (o.supported_by.empty()) {
        o.z = 0.0;
      } else {
        if (placed.count(o.supported_by) == 0) continue;
        for (const auto& b : s.objects) {
          if (b.id == o.supported_by) o.z = b.top();
        }
      }
      placed.insert(o.id);
      progress = true;
    }
  }
  if (!s.bounds.contains(s.robot.position())) throw WorldError("robot starts outside the bounds");
  return s;
}

WorldState load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw WorldError("cannot open world file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& ex) {
    throw WorldError(path.string() + ": " + ex.what());
  }
  return world_from_json(doc);
}

json to_json(const WorldObject& o) {
  json j = {{"id", o.id},         {"label", o.label}, {"x", o.pose.x}, {"y", o.pose.y}, {"hx", o.hx},
            {"hy", o.hy},         {"height", o.height}, {"z", o.z}};
  if (!o.supported_by.empty()) j["supported_by"] = o.supported_by;
  if (!o.kind.empty()) {
    j["kind"] = o.kind;
    j["passable"] = o.passable;
    j["acknowledged"] = o.acknowledged;
  }
  return j;
}

json to_json(const WorldState& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back(to_json(o));
  json walls = json::array();
  for (const auto& w : s.walls) walls.push_back(box_json(w));
  json regions = json::object();
  for (const auto& [name, box] : s.regions) regions[name] = box_json(box);
  json routes = json::object();
  for (const auto& [name, pts] : s.routes) {
    json list = json::array();
    for (const auto& p : pts) list.push_back(json::array({p.x, p.y}));
    routes[name] = std::move(list);
  }
  json j = {{"name", s.name},
            {"tick", s.tick},
            {"bounds", box_json(s.bounds)},
            {"walls", std::move(walls)},
            {"robot", {{"x", s.robot.x}, {"y", s.robot.y}, {"heading", s.robot.heading}}},
            {"objects", std::move(objects)},
            {"regions", std::move(regions)},
            {"routes", std::move(routes)},
            {"halted", s.halted},
            {"outcome", s.outcome}};
  j["held"] = s.held ? to_json(*s.held) : json(nullptr);
  if (!s.min_clearance.empty()) j["min_clearance"] = s.min_clearance;
  return j;
}

json snapshot(const WorldState& s) {
  json objects = json::array();
  for (const auto& o : s.objects) {
    objects.push_back({{"id", o.id}, {"label", o.label}, {"x", o.pose.x}, {"y", o.pose.y}, {"hx", o.hx}, {"hy", o.hy}});
  }
  return {{"tick", s.tick},
          {"robot", {{"x", s.robot.x}, {"y", s.robot.y}, {"heading", s.robot.heading}}},
          {"objects", std::move(objects)}};
}

}  // namespace rai::sim
