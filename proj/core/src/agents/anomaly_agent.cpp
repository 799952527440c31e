#include "rai/agents/anomaly_agent.hpp"

#include <cstdio>

#include "rai/sim/orchard.hpp"

namespace rai::agents {

using nlohmann::json;
using toolkit::ParamType;
using toolkit::ToolCall;
using toolkit::ToolContext;
using toolkit::ToolOutcome;

namespace {

const char* describe_resolution(const std::string& name) {
  if (name == "replan_route") return "Drive around the obstacle on a detour and rejoin the route.";
  if (name == "drive_forward") return "Keep driving along the route, over the obstacle.";
  if (name == "flash_signal") return "Flash the lights, then check the path again.";
  if (name == "sound_signal") return "Sound the horn, then check the path again.";
  return "Stop the task and stay halted.";
}

}  // namespace

std::string describe_anomaly(const AnomalyEvent& e) {
  char head[256];
  std::snprintf(head, sizeof head, "The tractor stopped at tick %lld: %s (%s) is %.2f units ahead in its path.",
                static_cast<long long>(e.tick), e.obstacle_label.c_str(), e.obstacle_id.c_str(), e.obstacle_distance);
  std::string text = head;
  text += "\nCamera observation:";
  const auto detections = e.observation.value("detections", json::array());
  if (detections.empty()) text += "\n(nothing detected)";
  for (const auto& d : detections) {
    char line[256];
    std::snprintf(line, sizeof line, "\n%s: distance=%.2f bearing=%.1f", d.value("label", std::string("?")).c_str(),
                  d.value("distance", 0.0), d.value("bearing", 0.0) + 0.0);
    text += line;
  }
  text += "\nChoose exactly one response.";
  return text;
}

AnomalyAgent::AnomalyAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, AnomalyConfig config)
    : Agent(std::move(id), bus, period_ms), config_(std::move(config)) {
  if (!config_.provider) throw std::invalid_argument("anomaly agent needs a provider");
  if (config_.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  for (const auto& name : sim::resolution_names()) {
    tools_.add({toolkit::ToolSpec{name, describe_resolution(name),
                                  {{"reason", ParamType::kText, false, "why this response fits"}}},
                [this, name](const ToolCall& call, ToolContext&) {
                  if (choice_) return ToolOutcome::error(call.id, "a response was already chosen: " + *choice_);
                  choice_ = name;
                  choice_reason_ = call.arguments.value("reason", std::string());
                  return ToolOutcome::success(call.id, "response recorded: " + name);
                }});
  }
  context_.bus = &bus_;
  context_.identity = config_.identity.get();
  events_ = bus_.subscribe(topics::kAnomalyEvents);
}

void AnomalyAgent::iterate() {
  while (!stop_requested()) {
    auto msg = events_.try_pop();
    if (!msg) return;
    AnomalyEvent event;
    try {
      event = anomaly_from_json(msg->payload);
    } catch (const RecordError& ex) {
      trace("bad_event", {{"payload", msg->payload}, {"error", ex.what()}});
      continue;
    }
    handle(event);
  }
}

void AnomalyAgent::handle(const AnomalyEvent& event) {
  choice_.reset();
  choice_reason_.clear();
  auto conversation = whoami::open_conversation(config_.system_prompt, config_.condition, describe_anomaly(event));
  ReactConfig rc{config_.provider.get(), &tools_, config_.max_steps, config_.params};
  auto sink = [this](const std::string& kind, const json& payload) { trace(kind, payload); };
  // One-shot: the session ends as soon as a response is chosen.
  ReactResult result = react_loop(rc, conversation, context_, [this] { return choice_.has_value() || stop_requested(); }, sink);

  Resolution r;
  r.event_id = event.event_id;
  r.obstacle_id = event.obstacle_id;
  r.agent = id();
  if (choice_) {
    r.resolution = *choice_;
    r.reason = choice_reason_;
  } else {
    r.resolution = kFailSafeResolution;
    r.reason = "fail-safe: " + (result.error.empty() ? std::string("no response chosen") : result.error);
  }
  ++handled_;
  bus_.publish(topics::kAnomalyResolutions, to_json(r));
  trace("resolution", {{"resolution", to_json(r)},
                       {"fail_safe", !choice_.has_value()},
                       {"model_calls", result.model_calls},
                       {"script_exhausted", result.script_exhausted}});
}

}  // namespace rai::agents
