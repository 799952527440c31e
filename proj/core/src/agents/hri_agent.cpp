#include "rai/agents/hri_agent.hpp"

#include "rai/toolkit/builtin.hpp"

namespace rai::agents {

using nlohmann::json;
using toolkit::ParamType;
using toolkit::ToolCall;
using toolkit::ToolContext;
using toolkit::ToolOutcome;

toolkit::Tool dispatch_mission_tool() {
  toolkit::ToolSpec spec{"dispatch_mission",
                         "Hand a task to the robot's mission executor. Use the operator's own words as the prompt.",
                         {{"prompt", ParamType::kText, true, "what the robot should do"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            auto& bus = ctx.require_bus();
            MissionRecord record;
            record.mission_id = "mission-" + bus.next_id().substr(0, 8);
            record.prompt = call.arguments.at("prompt").get<std::string>();
            if (record.prompt.empty()) return ToolOutcome::error(call.id, "empty prompt");
            bus.publish(topics::kMissionRequests, to_json(record));
            return ToolOutcome::success(call.id, "dispatched, mission_id=" + record.mission_id);
          }};
}

toolkit::ToolRegistry hri_registry() {
  toolkit::ToolRegistry r;
  r.add(dispatch_mission_tool());
  r.add(toolkit::query_identity_tool());
  r.add(toolkit::get_distance_to_objects_tool());
  return r;
}

std::string summarize(const json& record) {
  std::string text = "mission " + record.value("mission_id", std::string("?")) + " " +
                     record.value("status", std::string("?"));
  const std::string report = record.value("report", std::string());
  if (!report.empty()) text += ": " + report;
  return text;
}

HriAgent::HriAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, ConversationalConfig config)
    : ConversationalAgent(std::move(id), bus, period_ms, std::move(config)) {
  status_ = bus_.subscribe(topics::kMissionStatus);
  status_arrivals_ = bus_.add_tap([this](const msgbus::Envelope& e) {
    if (e.kind == msgbus::Kind::kPub && e.topic == topics::kMissionStatus) {
      status_arrived_at_[e.id] = static_cast<std::int64_t>(iterations());
    }
  });
}

void HriAgent::before_turns() {
  while (auto e = status_.try_pop()) {
    bus_.publish(config().outbox_topic, json{{"text", summarize(e->payload)}, {"mission", e->payload}});
    ++relayed_;
    const auto answered = static_cast<std::int64_t>(iterations());
    auto it = status_arrived_at_.find(e->id);
    const std::int64_t arrival = it == status_arrived_at_.end() ? -1 : it->second;
    if (it != status_arrived_at_.end()) status_arrived_at_.erase(it);
    trace("relay", {{"message_id", e->id},
                    {"mission", e->payload},
                    {"arrival_iteration", arrival},
                    {"answered_iteration", answered},
                    {"latency_iterations", arrival < 0 ? -1 : answered - arrival}});
  }
}

}  // namespace rai::agents
