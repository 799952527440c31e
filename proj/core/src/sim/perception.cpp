#include "rai/sim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rai/toolkit/builtin.hpp"

namespace rai::sim {

using nlohmann::json;

namespace {

// Ids of every object in the same stack as `target`.
std::set<std::string> stack_of(const WorldState& state, const WorldObject& target) {
  std::set<std::string> members{target.id};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& o : state.objects) {
      if (members.count(o.id) != 0) continue;
      const bool above = !o.supported_by.empty() && members.count(o.supported_by) != 0;
      const bool below = std::any_of(state.objects.begin(), state.objects.end(), [&](const WorldObject& m) {
        return members.count(m.id) != 0 && m.supported_by == o.id;
      });
      if (above || below) {
        members.insert(o.id);
        grew = true;
      }
    }
  }
  return members;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

bool is_visible(const WorldState& state, const WorldObject& target) {
  const Vec2 eye = state.robot.position();
  const Vec2 centre = target.pose.position();
  const double d = distance(eye, centre);
  if (d > state.params.range) return false;
  if (d > 0) {
    const double bearing = normalize_bearing(heading_to(eye, centre) - state.robot.heading);
    if (std::abs(bearing) > state.params.fov) return false;
  }
  for (const auto& w : state.walls) {
    if (segment_crosses(eye, centre, w)) return false;
  }
  const auto stack = stack_of(state, target);
  for (const auto& o : state.objects) {
    if (stack.count(o.id) != 0) continue;
    if (segment_crosses(eye, centre, o.footprint())) return false;
  }
  return true;
}

CameraObservation observe(const WorldState& state, const std::vector<std::string>& queries) {
  CameraObservation obs;
  obs.tick = state.tick;
  const Vec2 eye = state.robot.position();
  for (const auto& o : state.objects) {
    if (!queries.empty() && std::none_of(queries.begin(), queries.end(), [&](const std::string& q) {
          return toolkit::label_matches(o.label, q);
        })) {
      continue;
    }
    if (!is_visible(state, o)) continue;
    Detection det;
    det.id = o.id;
    det.label = o.label;
    det.distance = distance(eye, o.pose.position());
    det.bearing = det.distance > 0 ? normalize_bearing(heading_to(eye, o.pose.position()) - state.robot.heading) : 0.0;
    det.confidence = round2(1.0 - det.distance / state.params.range);
    const auto entry = segment_entry(eye, o.pose.position(), o.footprint());
    det.depth = o.footprint().contains(eye) ? 0.0 : det.distance * entry.value_or(1.0);
    obs.detections.push_back(std::move(det));
  }
  std::sort(obs.detections.begin(), obs.detections.end(), [](const Detection& a, const Detection& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  return obs;
}

json to_json(const Detection& d) {
  return {{"id", d.id},
          {"label", d.label},
          {"distance", d.distance},
          {"bearing", d.bearing},
          {"confidence", d.confidence},
          {"depth", d.depth}};
}

json to_json(const CameraObservation& obs) {
  json list = json::array();
  for (const auto& d : obs.detections) list.push_back(to_json(d));
  return {{"tick", obs.tick}, {"detections", std::move(list)}};
}

}  // namespace rai::sim
