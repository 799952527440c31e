#include "rai/agents/agent.hpp"

namespace rai::agents {

std::string_view to_string(AgentState state) {
  switch (state) {
    case AgentState::kCreated: return "CREATED";
    case AgentState::kRunning: return "RUNNING";
    case AgentState::kStopping: return "STOPPING";
    case AgentState::kStopped: return "STOPPED";
  }
  return "?";
}

Agent::Agent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms)
    : bus_(bus), id_(std::move(id)), period_ms_(period_ms) {
  if (period_ms_ <= 0) throw std::invalid_argument("agent period must be positive");
}

Agent::~Agent() = default;

void Agent::run() {
  if (state_ != AgentState::kCreated) throw AlreadyRunning("agent " + id_ + " already ran");
  if (stop_requested_) {
    finish();
    return;
  }
  state_ = AgentState::kRunning;
  trace("agent_state", {{"state", to_string(state_)}});
  schedule();
}

void Agent::stop() {
  if (stop_requested_) return;
  stop_requested_ = true;
  if (state_ == AgentState::kRunning) {
    state_ = AgentState::kStopping;
    trace("agent_state", {{"state", to_string(state_)}});
  }
}

void Agent::schedule() {
  std::weak_ptr<bool> alive = alive_;
  bus_.loop().post_after(period_ms_, [this, alive] {
    if (alive.lock()) loop_once();
  });
}

void Agent::loop_once() {
  if (stop_requested_) {
    finish();
    return;
  }
  ++iterations_;
  try {
    iterate();
  } catch (const std::exception& ex) {
    // A failing agent stops; the rest of the system keeps running.
    trace("agent_error", {{"error", ex.what()}, {"iteration", iterations_}});
    stop_requested_ = true;
  }
  if (stop_requested_ || finished()) {
    finish();
    return;
  }
  schedule();
}

void Agent::finish() {
  if (state_ == AgentState::kStopped) return;
  state_ = AgentState::kStopped;
  trace("agent_state", {{"state", to_string(state_)}, {"iterations", iterations_}});
  on_stopped();
}

void Agent::trace(const std::string& kind, const nlohmann::json& payload) const {
  if (trace_) trace_(id_, kind, payload);
}

Agent& AgentRuntime::add(std::unique_ptr<Agent> agent) {
  if (!agent) throw std::invalid_argument("null agent");
  if (find(agent->id()) != nullptr) throw std::invalid_argument("duplicate agent id " + agent->id());
  agents_.push_back(std::move(agent));
  return *agents_.back();
}

void AgentRuntime::run_all() {
  for (auto& a : agents_) a->run();
}

void AgentRuntime::stop_all() {
  for (auto& a : agents_) a->stop();
}

bool AgentRuntime::all_stopped() const {
  for (const auto& a : agents_) {
    if (a->state() != AgentState::kStopped) return false;
  }
  return true;
}

Agent* AgentRuntime::find(const std::string& id) const {
  for (const auto& a : agents_) {
    if (a->id() == id) return a.get();
  }
  return nullptr;
}

}  // namespace rai::agents
