#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "rai/agents/agent.hpp"
#include "rai/agents/fsm.hpp"
#include "rai/agents/react.hpp"
#include "rai/agents/records.hpp"
#include "rai/toolkit/builtin.hpp"
#include "rai/whoami/bundle.hpp"

namespace rai::agents {

inline constexpr double kSuccessTolerance = 0.25;
inline constexpr double kApproachStandoff = 0.1;
inline constexpr double kApproachTolerance = 0.05;

struct ControlConfig {
  // Optional planner: a bounded ReAct sub-loop that picks the target with
  // select_target. Without it the target is the visible object whose label
  // occurs in the prompt.
  std::shared_ptr<llm::ChatProvider> planner;
  std::string planner_prompt;
  int max_steps = kDefaultMaxSteps;
  llm::CompletionParams params;
  std::shared_ptr<const whoami::IdentityBundle> identity;
  double tolerance = kSuccessTolerance;
  double standoff = kApproachStandoff;
  // Goal tolerance requested from the navigation action.
  double nav_tolerance = kApproachTolerance;
  std::string nav_action = "nav/goto";
  std::string pose_service = "robot/pose";
};

// Everything one mission run reads and writes.
struct MissionContext {
  MissionRecord record;
  std::optional<std::string> target_label;
  std::optional<toolkit::Measurement> target;
  double goal_x = 0.0;
  double goal_y = 0.0;
  std::string goal_id;
  std::string nav_status;
  std::optional<double> final_distance;
  std::string failure;
  int monitor_polls = 0;
};

// Mission executor. Takes MissionRecords from mission/requests one at a time
// and runs the mission state machine one step per iteration:
//   PLAN --planned--> ACT --started--> MONITOR --running--> MONITOR
//   MONITOR --arrived--> VERIFY --verified--> DONE
// and any state --failed--> FAILED. It publishes EXECUTING when a mission
// starts and exactly one terminal record when it ends.
class ControlAgent : public Agent {
 public:
  ControlAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, ControlConfig config);

  const StateMachine<MissionContext>& machine() const { return machine_; }
  bool busy() const { return active_.has_value(); }
  std::size_t completed() const { return completed_; }
  toolkit::ToolContext& tool_context() { return context_; }

 protected:
  void iterate() override;
  void on_stopped() override;

 private:
  void build_machine();
  void start(MissionRecord record);
  void report(MissionContext& m, MissionStatus status, std::string report);
  toolkit::ToolOutcome use(const std::string& tool, nlohmann::json arguments);

  std::string plan(MissionContext& m);
  std::string act(MissionContext& m);
  std::string monitor(MissionContext& m);
  std::string verify(MissionContext& m);
  std::optional<std::string> pick_target(MissionContext& m);

  ControlConfig config_;
  toolkit::ToolRegistry tools_;
  toolkit::ToolRegistry planner_tools_;
  toolkit::ToolContext context_;
  msgbus::Subscription requests_;
  StateMachine<MissionContext> machine_;
  std::optional<MissionContext> active_;
  FsmRun run_;
  bool reported_ = false;
  std::optional<std::string> selected_;
  std::size_t completed_ = 0;
  int tool_seq_ = 0;
};

}  // namespace rai::agents
