#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/sim/geometry.hpp"

namespace rai::sim {

class WorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  // Degrees in [0, 360); 0 is +x, counter-clockwise.
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct WorldObject {
  std::string id;
  std::string label;
  Pose2D pose;
  double hx = 0.5;
  double hy = 0.5;
  double height = 1.0;
  double z = 0.0;
  // Empty means resting on the ground.
  std::string supported_by;
  // Orchard obstacle kind (branch, rock, crate, person); empty otherwise.
  std::string kind;
  // Cleared by a drive_forward resolution; no longer blocks motion.
  bool passable = false;
  // Already handled by a resolution; ignored by the lookahead corridor.
  bool acknowledged = false;

  Box footprint() const { return Box::around(pose.position(), hx, hy); }
  double top() const { return z + height; }
};

struct WorldEvent {
  std::int64_t tick = 0;
  std::string kind;
  nlohmann::json detail;
};

// Terminal outcomes that stop the world.
inline constexpr const char* kSafetyViolation = "SAFETY_VIOLATION";
inline constexpr const char* kAbortedByAgent = "ABORTED_BY_AGENT";

struct WorldParams {
  double speed = 0.5;          // units per tick
  double max_turn = 30.0;      // degrees per tick
  double fov = 60.0;           // half angle, degrees
  double range = 10.0;         // sensor range
  double vehicle_width = 1.2;  // lookahead corridor width
  double lookahead = 3.0;      // lookahead corridor length
};

struct WorldState {
  std::string name;
  std::int64_t tick = 0;
  Box bounds{{0, 0}, {10, 10}};
  std::vector<Box> walls;
  std::vector<WorldObject> objects;
  Pose2D robot;
  std::optional<WorldObject> held;
  std::optional<Vec2> nav_goal;
  std::map<std::string, Box> regions;
  std::map<std::string, std::vector<Vec2>> routes;
  WorldParams params;
  bool halted = false;
  std::string outcome;
  std::vector<WorldEvent> events;
  // Closest the robot's swept path has come to each orchard obstacle.
  std::map<std::string, double> min_clearance;
};

class World {
 public:
  World() = default;
  // Throws WorldError if the state breaks solidity or support consistency.
  explicit World(WorldState state);

  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }
  std::int64_t tick() const { return state_.tick; }
  const Pose2D& robot() const { return state_.robot; }

  const WorldObject* find(const std::string& id) const;
  WorldObject* find(const std::string& id);

  void set_nav_goal(std::optional<Vec2> goal) { state_.nav_goal = goal; }
  const std::optional<Vec2>& nav_goal() const { return state_.nav_goal; }
  double distance_to_goal() const;

  // One tick: with a nav goal the robot either turns toward it (at most
  // max_turn) or, once facing it, advances min(speed, remaining), stopping at
  // the first wall or blocking object it would enter. A halted world only
  // advances the tick counter.
  void step();

  // First blocking contact along the straight move from the robot to
  // `target`, as the fraction of the move completed.
  std::optional<double> first_contact(Vec2 from, Vec2 to) const;

  void record(std::string kind, nlohmann::json detail);
  void halt(const std::string& outcome);

  // Every object's volume is disjoint from every other's and every supported
  // object sits on its support. Returns a description of the first problem.
  std::optional<std::string> check_invariants() const;

 private:
  WorldState state_;
};

// FNV-1a over a canonical rendering of the state, floats at 6 decimals.
std::string canonical_state(const WorldState& state);
std::string state_hash(const WorldState& state);

}  // namespace rai::sim
