#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rai/agents/agent.hpp"
#include "rai/agents/records.hpp"

namespace rai::agents {

inline constexpr int kSignalCooldownIterations = 20;

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
};

struct TractorConfig {
  std::vector<Waypoint> route;
  std::string nav_action = "nav/goto";
  std::string lookahead_service = "vehicle/lookahead";
  std::string resolve_service = "orchard/resolve";
  std::string detect_service = "detect";
  std::string pose_service = "robot/pose";
  // After a visual or audible signal the tractor waits this many iterations
  // before checking the corridor again.
  int signal_cooldown = kSignalCooldownIterations;
};

// Rule-based route follower. Drives the route one waypoint at a time through
// nav/goto and checks the lookahead corridor every iteration. A blocked
// corridor cancels the current goal, publishes an AnomalyEvent on
// anomaly/events and hands control over: the tractor waits for the matching
// resolution on anomaly/resolutions and applies it through orchard/resolve.
// Progress and the final outcome go to tractor/status as {"event", ...}.
class TractorAgent : public Agent {
 public:
  enum class Mode { kDriving, kWaiting, kCooldown, kCompleted, kAborted };

  TractorAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, TractorConfig config);

  Mode mode() const { return mode_; }
  std::size_t next_waypoint() const { return next_; }
  const std::vector<Waypoint>& route() const { return route_; }
  std::size_t anomalies() const { return anomalies_; }

 protected:
  void iterate() override;
  bool finished() const override { return mode_ == Mode::kCompleted || mode_ == Mode::kAborted; }

 private:
  void drive();
  void wait_for_resolution();
  void raise_anomaly(const nlohmann::json& obstacle);
  void apply(const Resolution& resolution);
  void end(Mode mode, const std::string& event, nlohmann::json detail = nlohmann::json::object());
  void status(const std::string& event, nlohmann::json detail = nlohmann::json::object());

  TractorConfig config_;
  std::vector<Waypoint> route_;
  std::size_t next_ = 0;
  Mode mode_ = Mode::kDriving;
  msgbus::GoalHandle goal_;
  msgbus::Subscription resolutions_;
  std::optional<AnomalyEvent> pending_;
  int cooldown_ = 0;
  std::size_t anomalies_ = 0;
};

std::string_view to_string(TractorAgent::Mode mode);

}  // namespace rai::agents
