#include "rai/sim/sim_node.hpp"

#include "rai/sim/manipulation.hpp"
#include "rai/sim/orchard.hpp"
#include "rai/sim/perception.hpp"
#include "rai/sim/world_io.hpp"

namespace rai::sim {

using nlohmann::json;
namespace mb = rai::msgbus;

SimNode::SimNode(mb::Bus& bus, World world, SimNodeOptions options)
    : bus_(bus), world_(std::move(world)), options_(options) {}

SimNode::~SimNode() { stop(); }

void SimNode::start() {
  if (alive_) return;
  alive_ = std::make_shared<bool>(true);

  mb::ActionServer nav;
  nav.accept = [this](const json& goal) {
    if (!goal.is_object() || !goal.contains("x") || !goal.contains("y") || !goal["x"].is_number() ||
        !goal["y"].is_number()) {
      return false;
    }
    return world_.state().bounds.contains({goal["x"].get<double>(), goal["y"].get<double>()});
  };
  nav.execute = [this](std::shared_ptr<mb::ServerGoal> goal) {
    if (goal_ && goal_->active()) {
      goal_->abort({{"reached", false}, {"final_distance", world_.distance_to_goal()}, {"reason", "preempted"}});
    }
    goal_ = std::move(goal);
    const Vec2 target{goal_->goal()["x"].get<double>(), goal_->goal()["y"].get<double>()};
    goal_tolerance_ = kNavTolerance;
    if (goal_->goal().contains("tolerance") && goal_->goal()["tolerance"].is_number() &&
        goal_->goal()["tolerance"].get<double>() > 0.0) {
      goal_tolerance_ = goal_->goal()["tolerance"].get<double>();
    }
    world_.set_nav_goal(target);
    last_remaining_ = world_.distance_to_goal();
    stall_ticks_ = 0;
    world_.record("nav_goal", {{"goal_id", goal_->id()}, {"x", target.x}, {"y", target.y}});
    flush_events();
  };
  registrations_.push_back(bus_.register_action_server("nav/goto", std::move(nav)));

  registrations_.push_back(bus_.register_service("detect", [this](const json& req) {
    std::vector<std::string> queries;
    if (req.is_object() && req.contains("queries")) queries = req["queries"].get<std::vector<std::string>>();
    return to_json(observe(world_.state(), queries));
  }));
  registrations_.push_back(bus_.register_service("manip", [this](const json& req) {
    json reply = handle_manip_request(world_, req);
    flush_events();
    return reply;
  }));
  registrations_.push_back(bus_.register_service("scene/objects", [this](const json&) {
    json objects = json::array();
    for (const auto& o : world_.state().objects) objects.push_back(to_json(o));
    const auto& held = world_.state().held;
    return json{{"objects", objects}, {"held", held ? json(held->id) : json(nullptr)}};
  }));
  registrations_.push_back(bus_.register_service("robot/pose", [this](const json&) {
    const auto& r = world_.robot();
    return json{{"x", r.x}, {"y", r.y}, {"heading", r.heading}, {"tick", world_.tick()}};
  }));
  registrations_.push_back(bus_.register_service("vehicle/lookahead", [this](const json&) {
    const WorldObject* o = corridor_obstacle(world_.state());
    if (o == nullptr) return json{{"blocked", false}};
    return json{{"blocked", true},
                {"obstacle",
                 {{"id", o->id},
                  {"label", o->label},
                  {"distance", point_box_distance(world_.robot().position(), o->footprint())}}}};
  }));
  registrations_.push_back(bus_.register_service("orchard/resolve", [this](const json& req) {
    json reply = resolve_anomaly(world_, req);
    flush_events();
    return reply;
  }));

  std::weak_ptr<bool> alive = alive_;
  bus_.loop().post_after(options_.tick_ms, [this, alive] {
    if (alive.lock()) tick();
  });
}

void SimNode::stop() {
  if (!alive_) return;
  alive_.reset();
  registrations_.clear();
}

void SimNode::finish_goal(mb::ActionStatus status) {
  json result = {{"reached", status == mb::ActionStatus::kSucceeded}, {"final_distance", world_.distance_to_goal()}};
  if (status == mb::ActionStatus::kSucceeded) {
    goal_->succeed(result);
  } else if (status == mb::ActionStatus::kCanceled) {
    goal_->cancel(result);
  } else {
    result["reason"] = "blocked";
    goal_->abort(result);
  }
  world_.record("nav_result", {{"goal_id", goal_->id()},
                               {"status", mb::to_string(status)},
                               {"final_distance", result["final_distance"]}});
  world_.set_nav_goal(std::nullopt);
  goal_.reset();
}

void SimNode::tick() {
  const bool tracking = goal_ && goal_->active();
  if (tracking && goal_->cancel_requested()) {
    finish_goal(mb::ActionStatus::kCanceled);
  }
  world_.step();
  if (goal_ && goal_->active()) {
    const double remaining = world_.distance_to_goal();
    if (remaining <= goal_tolerance_) {
      finish_goal(mb::ActionStatus::kSucceeded);
    } else {
      stall_ticks_ = remaining < last_remaining_ - 1e-9 ? 0 : stall_ticks_ + 1;
      last_remaining_ = std::min(last_remaining_, remaining);
      if (stall_ticks_ >= kNavStallTicks) {
        finish_goal(mb::ActionStatus::kAborted);
      } else {
        goal_->publish_feedback({{"distance_remaining", remaining}});
      }
    }
  }
  flush_events();
  if (options_.snapshot_every > 0 && world_.tick() % options_.snapshot_every == 0) {
    bus_.publish("world/snapshot", snapshot(world_.state()));
  }
  for (const auto& hook : tick_hooks_) hook(world_);

  std::weak_ptr<bool> alive = alive_;
  bus_.loop().post_after(options_.tick_ms, [this, alive] {
    if (alive.lock()) tick();
  });
}

void SimNode::flush_events() {
  const auto& events = world_.state().events;
  for (; events_flushed_ < events.size(); ++events_flushed_) {
    for (const auto& hook : event_hooks_) hook(events[events_flushed_]);
  }
}

}  // namespace rai::sim
