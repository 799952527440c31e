#include "rai/agents/tractor.hpp"

#include "rai/msgbus/errors.hpp"

namespace rai::agents {

using nlohmann::json;
namespace mb = rai::msgbus;

namespace {
constexpr mb::Millis kServiceTimeoutMs = 2000;
}

std::string_view to_string(TractorAgent::Mode mode) {
  switch (mode) {
    case TractorAgent::Mode::kDriving: return "DRIVING";
    case TractorAgent::Mode::kWaiting: return "WAITING";
    case TractorAgent::Mode::kCooldown: return "COOLDOWN";
    case TractorAgent::Mode::kCompleted: return "COMPLETED";
    case TractorAgent::Mode::kAborted: return "ABORTED";
  }
  return "?";
}

TractorAgent::TractorAgent(std::string id, mb::Bus& bus, mb::Millis period_ms, TractorConfig config)
    : Agent(std::move(id), bus, period_ms), config_(std::move(config)), route_(config_.route) {
  if (route_.empty()) throw std::invalid_argument("tractor route is empty");
  resolutions_ = bus_.subscribe(topics::kAnomalyResolutions);
}

void TractorAgent::iterate() {
  switch (mode_) {
    case Mode::kDriving:
      drive();
      break;
    case Mode::kWaiting:
      wait_for_resolution();
      break;
    case Mode::kCooldown:
      if (--cooldown_ <= 0) mode_ = Mode::kDriving;
      break;
    case Mode::kCompleted:
    case Mode::kAborted:
      break;
  }
}

void TractorAgent::drive() {
  if (goal_ && goal_.terminal()) {
    const auto s = goal_.status();
    if (s == mb::ActionStatus::kSucceeded) {
      status("waypoint_reached", {{"index", next_}, {"x", route_[next_].x}, {"y", route_[next_].y}});
      ++next_;
    } else if (s != mb::ActionStatus::kCanceled) {
      end(Mode::kAborted, "nav_failed", {{"status", mb::to_string(s)}, {"result", goal_.result()}});
      return;
    }
    goal_ = {};
  }
  if (next_ >= route_.size()) {
    end(Mode::kCompleted, "route_completed", {{"waypoints", route_.size()}});
    return;
  }
  json look = bus_.call_service(config_.lookahead_service, json::object(), kServiceTimeoutMs);
  if (look.value("blocked", false)) {
    if (goal_ && !goal_.terminal()) {
      try {
        bus_.request_cancel(goal_);
      } catch (const mb::AlreadyTerminal&) {
      }
    }
    raise_anomaly(look.at("obstacle"));
    return;
  }
  if (!goal_) {
    goal_ = bus_.send_goal(config_.nav_action, json{{"x", route_[next_].x}, {"y", route_[next_].y}});
    if (!goal_.accepted()) end(Mode::kAborted, "nav_failed", {{"status", "REJECTED"}, {"index", next_}});
  }
}

void TractorAgent::raise_anomaly(const json& obstacle) {
  AnomalyEvent e;
  e.event_id = id() + "-anomaly-" + std::to_string(++anomalies_);
  e.obstacle_id = obstacle.at("id").get<std::string>();
  e.obstacle_label = obstacle.value("label", e.obstacle_id);
  e.obstacle_distance = obstacle.value("distance", 0.0);
  json pose = bus_.call_service(config_.pose_service, json::object(), kServiceTimeoutMs);
  e.tick = pose.value("tick", std::int64_t{0});
  e.pose = {pose.value("x", 0.0), pose.value("y", 0.0), pose.value("heading", 0.0)};
  e.observation = bus_.call_service(config_.detect_service, json{{"queries", json::array()}}, kServiceTimeoutMs);
  pending_ = e;
  mode_ = Mode::kWaiting;
  bus_.publish(topics::kAnomalyEvents, to_json(e));
  trace("anomaly", to_json(e));
}

void TractorAgent::wait_for_resolution() {
  while (auto msg = resolutions_.try_pop()) {
    Resolution r;
    try {
      r = resolution_from_json(msg->payload);
    } catch (const RecordError& ex) {
      trace("bad_resolution", {{"payload", msg->payload}, {"error", ex.what()}});
      continue;
    }
    if (!pending_ || r.event_id != pending_->event_id) continue;
    apply(r);
    return;
  }
}

void TractorAgent::apply(const Resolution& r) {
  json request{{"obstacle", r.obstacle_id.empty() ? pending_->obstacle_id : r.obstacle_id}, {"action", r.resolution}};
  if (r.resolution == "replan_route") {
    json rest = json::array();
    for (std::size_t i = next_; i < route_.size(); ++i) rest.push_back({{"x", route_[i].x}, {"y", route_[i].y}});
    request["route"] = rest;
  }
  json reply = bus_.call_service(config_.resolve_service, request, kServiceTimeoutMs);
  trace("resolution_applied", {{"event_id", r.event_id}, {"resolution", r.resolution}, {"reply", reply}});
  pending_.reset();
  if (!reply.value("ok", false)) {
    end(Mode::kAborted, "aborted", {{"resolution", r.resolution}, {"error", reply.value("error", std::string())}});
    return;
  }
  if (r.resolution == "abort_task") {
    end(Mode::kAborted, "aborted", {{"resolution", r.resolution}});
  } else if (r.resolution == "drive_forward") {
    if (reply.value("violation", false)) {
      end(Mode::kAborted, "aborted", {{"resolution", r.resolution}, {"error", "SAFETY_VIOLATION"}});
    } else {
      mode_ = Mode::kDriving;
    }
  } else if (r.resolution == "replan_route") {
    std::vector<Waypoint> detour;
    for (const auto& p : reply.at("waypoints")) detour.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
    const auto rejoin = reply.at("rejoin").get<std::size_t>();
    // The detour ends at route_[next_ + rejoin]; it replaces everything up to
    // and including that waypoint.
    route_.erase(route_.begin() + static_cast<std::ptrdiff_t>(next_),
                 route_.begin() + static_cast<std::ptrdiff_t>(next_ + rejoin + 1));
    route_.insert(route_.begin() + static_cast<std::ptrdiff_t>(next_), detour.begin(), detour.end());
    status("replanned", {{"waypoints", reply.at("waypoints")}, {"clearance", reply.value("clearance", 0.0)}});
    mode_ = Mode::kDriving;
  } else {
    cooldown_ = config_.signal_cooldown;
    mode_ = cooldown_ > 0 ? Mode::kCooldown : Mode::kDriving;
  }
}

void TractorAgent::end(Mode mode, const std::string& event, json detail) {
  mode_ = mode;
  if (goal_ && !goal_.terminal()) {
    try {
      bus_.request_cancel(goal_);
    } catch (const mb::AlreadyTerminal&) {
    }
  }
  status(event, std::move(detail));
}

void TractorAgent::status(const std::string& event, json detail) {
  detail["event"] = event;
  detail["agent"] = id();
  bus_.publish(topics::kTractorStatus, detail);
  trace("status", detail);
}

}  // namespace rai::agents
