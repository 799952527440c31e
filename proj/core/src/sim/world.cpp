#include "rai/sim/world.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "rai/llm/hash_embedder.hpp"

namespace rai::sim {

namespace {

bool volumes_overlap(const WorldObject& a, const WorldObject& b) {
  return a.footprint().overlaps(b.footprint()) && a.z < b.top() && b.z < a.top();
}

}  // namespace

World::World(WorldState state) : state_(std::move(state)) {
  state_.robot.heading = normalize_heading(state_.robot.heading);
  if (auto problem = check_invariants()) throw WorldError(*problem);
}

const WorldObject* World::find(const std::string& id) const {
  for (const auto& o : state_.objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

WorldObject* World::find(const std::string& id) {
  for (auto& o : state_.objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

double World::distance_to_goal() const {
  if (!state_.nav_goal) return 0.0;
  return distance(state_.robot.position(), *state_.nav_goal);
}

std::optional<double> World::first_contact(Vec2 from, Vec2 to) const {
  std::optional<double> best;
  auto consider = [&](const Box& box) {
    if (box.interior_contains(from)) return;
    if (auto t = segment_entry(from, to, box); t && (!best || *t < *best)) best = t;
  };
  for (const auto& w : state_.walls) consider(w);
  for (const auto& o : state_.objects) {
    if (!o.passable) consider(o.footprint());
  }
  return best;
}

void World::step() {
  ++state_.tick;
  if (state_.halted || !state_.nav_goal) return;
  Pose2D& r = state_.robot;
  const Vec2 goal = *state_.nav_goal;
  const Vec2 here = r.position();
  const double remaining = distance(here, goal);
  if (remaining < 1e-9) return;

  const double error = normalize_bearing(heading_to(here, goal) - r.heading);
  if (std::abs(error) > 1e-6) {
    const double turn = std::clamp(error, -state_.params.max_turn, state_.params.max_turn);
    r.heading = normalize_heading(r.heading + turn);
    return;
  }
  const double advance = std::min(state_.params.speed, remaining);
  const Vec2 target = advance >= remaining ? goal : here + (goal - here) * (advance / remaining);
  Vec2 end = target;
  if (auto t = first_contact(here, target)) end = here + (target - here) * *t;
  r.x = end.x;
  r.y = end.y;
  for (const auto& o : state_.objects) {
    if (o.kind.empty()) continue;
    const double d = segment_box_distance(here, end, o.footprint());
    auto [it, fresh] = state_.min_clearance.emplace(o.id, d);
    if (!fresh) it->second = std::min(it->second, d);
  }
}

void World::record(std::string kind, nlohmann::json detail) {
  state_.events.push_back({state_.tick, std::move(kind), std::move(detail)});
}

void World::halt(const std::string& outcome) {
  if (state_.halted) return;
  state_.halted = true;
  state_.outcome = outcome;
  record("halted", {{"outcome", outcome}});
}

std::optional<std::string> World::check_invariants() const {
  const auto& objs = state_.objects;
  std::set<std::string> ids;
  for (const auto& o : objs) {
    if (o.id.empty()) return std::string("object without id");
    if (!ids.insert(o.id).second) return "duplicate object id " + o.id;
    if (o.hx <= 0 || o.hy <= 0 || o.height <= 0) return "object " + o.id + " has a non-positive size";
  }
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      if (volumes_overlap(objs[i], objs[j])) return "objects " + objs[i].id + " and " + objs[j].id + " overlap";
    }
  }
  for (const auto& o : objs) {
    if (o.supported_by.empty()) {
      if (std::abs(o.z) > 1e-9) return "object " + o.id + " floats at z=" + std::to_string(o.z);
      continue;
    }
    const WorldObject* base = find(o.supported_by);
    if (base == nullptr) return "object " + o.id + " rests on missing " + o.supported_by;
    if (std::abs(o.z - base->top()) > 1e-9) return "object " + o.id + " is not on top of " + base->id;
    if (!o.footprint().overlaps(base->footprint())) return "object " + o.id + " overhangs " + base->id;
    // Walk the chain to rule out cycles.
    std::set<std::string> chain{o.id};
    for (const WorldObject* cur = base; cur != nullptr; cur = cur->supported_by.empty() ? nullptr : find(cur->supported_by)) {
      if (!chain.insert(cur->id).second) return "support cycle through " + o.id;
    }
  }
  return std::nullopt;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void put_object(std::string& out, const WorldObject& o) {
  out += o.id + "|" + o.label + "|" + fixed(o.pose.x) + "|" + fixed(o.pose.y) + "|" + fixed(o.pose.heading) + "|" +
         fixed(o.hx) + "|" + fixed(o.hy) + "|" + fixed(o.height) + "|" + fixed(o.z) + "|" + o.supported_by + "|" +
         o.kind + "|" + (o.passable ? "1" : "0") + (o.acknowledged ? "1" : "0") + "\n";
}

}  // namespace

std::string canonical_state(const WorldState& s) {
  std::string out = "tick " + std::to_string(s.tick) + "\n";
  out += "robot " + fixed(s.robot.x) + " " + fixed(s.robot.y) + " " + fixed(s.robot.heading) + "\n";
  out += "goal ";
  out += s.nav_goal ? fixed(s.nav_goal->x) + " " + fixed(s.nav_goal->y) : std::string("-");
  out += "\nhalted " + std::string(s.halted ? "1 " : "0 ") + s.outcome + "\n";
  out += "held ";
  if (s.held) {
    put_object(out, *s.held);
  } else {
    out += "-\n";
  }
  std::vector<const WorldObject*> sorted;
  for (const auto& o : s.objects) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* o : sorted) put_object(out, *o);
  return out;
}

std::string state_hash(const WorldState& state) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(llm::fnv1a64(canonical_state(state))));
  return buf;
}

}  // namespace rai::sim
