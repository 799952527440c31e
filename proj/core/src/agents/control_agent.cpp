#include "rai/agents/control_agent.hpp"

#include <cmath>
#include <cstdio>

#include "rai/msgbus/errors.hpp"

namespace rai::agents {

using nlohmann::json;
using toolkit::ParamType;
using toolkit::ToolCall;
using toolkit::ToolContext;
using toolkit::ToolOutcome;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

ControlAgent::ControlAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, ControlConfig config)
    : Agent(std::move(id), bus, period_ms), config_(std::move(config)) {
  if (config_.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  tools_.add(toolkit::get_distance_to_objects_tool());
  tools_.add(toolkit::start_action_tool());
  tools_.add(toolkit::get_action_status_tool());
  tools_.add(toolkit::cancel_action_tool());

  planner_tools_.add(toolkit::get_distance_to_objects_tool());
  planner_tools_.add(toolkit::query_identity_tool());
  planner_tools_.add({toolkit::ToolSpec{"select_target",
                                        "Choose the object the robot should drive to.",
                                        {{"label", ParamType::kText, true, "label of the target object"}}},
                      [this](const ToolCall& call, ToolContext&) {
                        selected_ = call.arguments.at("label").get<std::string>();
                        return ToolOutcome::success(call.id, "target set to " + *selected_);
                      }});

  context_.bus = &bus_;
  context_.identity = config_.identity.get();
  requests_ = bus_.subscribe(topics::kMissionRequests);
  build_machine();
}

void ControlAgent::build_machine() {
  machine_.state("PLAN", [this](MissionContext& m) { return plan(m); })
      .state("ACT", [this](MissionContext& m) { return act(m); })
      .state("MONITOR", [this](MissionContext& m) { return monitor(m); })
      .state("VERIFY", [this](MissionContext& m) { return verify(m); })
      .state(
          "DONE",
          [this](MissionContext& m) {
            report(m, MissionStatus::kSucceeded,
                   "reached " + *m.target_label + " (distance " + fixed2(m.final_distance.value_or(0.0)) + ")");
            return std::string();
          },
          true)
      .state(
          "FAILED",
          [this](MissionContext& m) {
            report(m, MissionStatus::kFailed, m.failure.empty() ? "failed" : m.failure);
            return std::string();
          },
          true)
      .initial("PLAN")
      .on("PLAN", "planned", "ACT")
      .on("PLAN", "failed", "FAILED")
      .on("ACT", "started", "MONITOR")
      .on("ACT", "failed", "FAILED")
      .on("MONITOR", "running", "MONITOR")
      .on("MONITOR", "arrived", "VERIFY")
      .on("MONITOR", "failed", "FAILED")
      .on("VERIFY", "verified", "DONE")
      .on("VERIFY", "failed", "FAILED");
  machine_.validate();
}

void ControlAgent::iterate() {
  if (!active_) {
    auto e = requests_.try_pop();
    if (!e) return;
    MissionRecord record;
    try {
      record = mission_from_json(e->payload);
    } catch (const RecordError& ex) {
      trace("bad_request", {{"payload", e->payload}, {"error", ex.what()}});
      return;
    }
    start(std::move(record));
  }
  const std::string before = run_.state;
  machine_.step(run_, *active_);
  trace("fsm_step", {{"mission_id", active_->record.mission_id}, {"from", before}, {"to", run_.state}});
  if (run_.status == FsmStatus::kRunning) return;
  if (!reported_) {
    active_->failure = run_.error;
    report(*active_, MissionStatus::kFailed, run_.error);
  }
  trace("mission_done", {{"mission_id", active_->record.mission_id}, {"path", run_.path}});
  active_.reset();
  ++completed_;
}

void ControlAgent::on_stopped() {
  if (active_ && !reported_) report(*active_, MissionStatus::kFailed, "control agent stopped");
  active_.reset();
}

void ControlAgent::start(MissionRecord record) {
  active_.emplace();
  active_->record = std::move(record);
  active_->record.status = MissionStatus::kExecuting;
  active_->record.report.clear();
  reported_ = false;
  selected_.reset();
  run_ = machine_.begin();
  bus_.publish(topics::kMissionStatus, to_json(active_->record));
  trace("mission_start", to_json(active_->record));
}

void ControlAgent::report(MissionContext& m, MissionStatus status, std::string text) {
  if (reported_) return;
  reported_ = true;
  m.record.status = status;
  m.record.report = std::move(text);
  m.record.final_distance = m.final_distance;
  bus_.publish(topics::kMissionStatus, to_json(m.record));
  trace("mission_report", to_json(m.record));
}

ToolOutcome ControlAgent::use(const std::string& tool, json arguments) {
  ToolCall call{"ctl_" + std::to_string(++tool_seq_), tool, std::move(arguments)};
  ToolOutcome outcome = toolkit::execute(call, tools_, context_);
  trace("tool_result", {{"call_id", call.id},
                        {"name", call.name},
                        {"arguments", call.arguments},
                        {"status", toolkit::to_string(outcome.status)},
                        {"text", outcome.text()}});
  return outcome;
}

std::optional<std::string> ControlAgent::pick_target(MissionContext& m) {
  if (config_.planner) {
    auto conversation = whoami::open_conversation(config_.planner_prompt, whoami::language_only(),
                                                  "Mission: " + m.record.prompt);
    ReactConfig rc{config_.planner.get(), &planner_tools_, config_.max_steps, config_.params};
    auto sink = [this](const std::string& kind, const json& payload) { trace(kind, payload); };
    ReactResult r = react_loop(rc, conversation, context_, [this] { return stop_requested(); }, sink);
    if (!selected_) {
      m.failure = "planner selected no target";
      if (!r.error.empty()) m.failure += ": " + r.error;
    }
    return selected_;
  }
  // Procedural: every visible object, the longest label found in the prompt.
  json seen = bus_.call_service(context_.detect_service, json{{"queries", json::array()}}, context_.service_timeout_ms);
  std::optional<std::string> best;
  for (const auto& d : seen.value("detections", json::array())) {
    const auto label = d.at("label").get<std::string>();
    if (toolkit::label_matches(m.record.prompt, label) && (!best || label.size() > best->size())) best = label;
  }
  if (!best) m.failure = "object not visible";
  return best;
}

std::string ControlAgent::plan(MissionContext& m) {
  try {
    m.target_label = pick_target(m);
    if (!m.target_label) return "failed";
    auto found = toolkit::measure_objects(context_, {*m.target_label});
    trace("perception", {{"text", toolkit::render_distances({*m.target_label}, found)}});
    if (found.empty()) {
      m.failure = "object not visible";
      return "failed";
    }
    m.target = found.front();
    json pose = bus_.call_service(config_.pose_service, json::object(), context_.service_timeout_ms);
    const double angle = (pose.at("heading").get<double>() + m.target->bearing) * kDegToRad;
    const double reach = std::max(0.0, m.target->depth - config_.standoff);
    m.goal_x = pose.at("x").get<double>() + reach * std::cos(angle);
    m.goal_y = pose.at("y").get<double>() + reach * std::sin(angle);
    return "planned";
  } catch (const std::exception& ex) {
    m.failure = std::string("perception failed: ") + ex.what();
    return "failed";
  }
}

std::string ControlAgent::act(MissionContext& m) {
  auto outcome = use("start_action", {{"name", config_.nav_action}, {"goal", json{{"x", m.goal_x}, {"y", m.goal_y}, {"tolerance", config_.nav_tolerance}}.dump()}});
  const std::string text = outcome.text();
  const auto at = text.find("goal_id=");
  if (at != std::string::npos) m.goal_id = text.substr(at + 8);
  if (!outcome.ok()) {
    m.failure = text.rfind("rejected", 0) == 0 ? "navigation goal rejected" : "navigation failed: " + text;
    return "failed";
  }
  return "started";
}

std::string ControlAgent::monitor(MissionContext& m) {
  ++m.monitor_polls;
  use("get_action_status", {{"goal_id", m.goal_id}});
  auto it = context_.goals.find(m.goal_id);
  if (it == context_.goals.end()) {
    m.failure = "lost track of goal " + m.goal_id;
    return "failed";
  }
  const auto status = it->second.status();
  m.nav_status = std::string(msgbus::to_string(status));
  if (status == msgbus::ActionStatus::kSucceeded) return "arrived";
  if (status == msgbus::ActionStatus::kCanceled || status == msgbus::ActionStatus::kAborted ||
      status == msgbus::ActionStatus::kRejected) {
    m.failure = "navigation " + m.nav_status;
    const json result = it->second.result();
    if (result.is_object() && result.contains("reason")) m.failure += " (" + result["reason"].get<std::string>() + ")";
    return "failed";
  }
  return "running";
}

std::string ControlAgent::verify(MissionContext& m) {
  try {
    auto found = toolkit::measure_objects(context_, {*m.target_label});
    const toolkit::Measurement* same = nullptr;
    for (const auto& f : found) {
      if (f.id == m.target->id) same = &f;
    }
    if (same == nullptr) {
      m.failure = "target lost after navigation";
      return "failed";
    }
    m.final_distance = same->depth;
    if (same->depth <= config_.tolerance) return "verified";
    m.failure = "target not reached: distance " + fixed2(same->depth);
    return "failed";
  } catch (const std::exception& ex) {
    m.failure = std::string("perception failed: ") + ex.what();
    return "failed";
  }
}

}  // namespace rai::agents
