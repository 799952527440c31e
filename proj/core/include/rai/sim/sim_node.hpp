#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rai/msgbus/bus.hpp"
#include "rai/sim/world.hpp"

namespace rai::sim {

inline constexpr double kNavTolerance = 0.25;
inline constexpr int kNavStallTicks = 20;

struct SimNodeOptions {
  msgbus::Millis tick_ms = 100;
  // world/snapshot is published every this many ticks.
  int snapshot_every = 10;
};

// Owns the world and exposes it on the bus:
//   action  nav/goto          {x, y, tolerance?} -> feedback {distance_remaining},
//                             result {reached, final_distance}
//   service detect            {queries} -> CameraObservation
//   service manip             pick / place_at / place_on
//   service scene/objects     {} -> {objects, held}
//   service robot/pose        {} -> {x, y, heading, tick}
//   service vehicle/lookahead {} -> {blocked, obstacle?}
//   service orchard/resolve   resolution request
//   topic   world/snapshot    every snapshot_every ticks
// The world advances one tick per tick_ms on the bus's event loop; all access
// goes through that loop.
class SimNode {
 public:
  using EventHook = std::function<void(const WorldEvent&)>;
  using TickHook = std::function<void(const World&)>;

  SimNode(msgbus::Bus& bus, World world, SimNodeOptions options = {});
  ~SimNode();
  SimNode(const SimNode&) = delete;
  SimNode& operator=(const SimNode&) = delete;

  void start();
  void stop();

  World& world() { return world_; }
  const World& world() const { return world_; }

  // Called for every world event, in order, right after the tick (or service
  // call) that produced it.
  void on_event(EventHook hook) { event_hooks_.push_back(std::move(hook)); }
  // Called after every tick.
  void on_tick(TickHook hook) { tick_hooks_.push_back(std::move(hook)); }

 private:
  void tick();
  void flush_events();
  void finish_goal(msgbus::ActionStatus status);

  msgbus::Bus& bus_;
  World world_;
  SimNodeOptions options_;
  std::vector<msgbus::Registration> registrations_;
  std::shared_ptr<msgbus::ServerGoal> goal_;
  double goal_tolerance_ = kNavTolerance;
  double last_remaining_ = 0.0;
  int stall_ticks_ = 0;
  std::size_t events_flushed_ = 0;
  std::vector<EventHook> event_hooks_;
  std::vector<TickHook> tick_hooks_;
  std::shared_ptr<bool> alive_;
};

}  // namespace rai::sim
