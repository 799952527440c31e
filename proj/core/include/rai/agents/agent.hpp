#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/msgbus/bus.hpp"

namespace rai::agents {

enum class AgentState { kCreated, kRunning, kStopping, kStopped };

std::string_view to_string(AgentState state);

class AlreadyRunning : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Receives structured trace records: (source, kind, payload).
using TraceSink = std::function<void(const std::string& source, const std::string& kind, const nlohmann::json& payload)>;

// Base of every agent: a sequential loop of iterate() calls scheduled on the
// bus's event loop every period_ms.
class Agent {
 public:
  Agent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms);
  virtual ~Agent();
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  const std::string& id() const { return id_; }
  AgentState state() const { return state_; }
  std::uint64_t iterations() const { return iterations_; }
  msgbus::Millis period_ms() const { return period_ms_; }

  // Legal only from CREATED; throws AlreadyRunning otherwise. Schedules the
  // loop and returns. If stop() was called first the agent goes straight to
  // STOPPED.
  void run();
  // Latches the stop signal; the loop exits at the next iteration boundary.
  // Idempotent.
  void stop();
  bool stop_requested() const { return stop_requested_; }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

 protected:
  virtual void iterate() = 0;
  // Subclasses may end their own loop (e.g. after a one-shot task).
  virtual bool finished() const { return false; }
  // Called once when the agent leaves the running states.
  virtual void on_stopped() {}

  void trace(const std::string& kind, const nlohmann::json& payload) const;
  const TraceSink& trace_sink() const { return trace_; }

  msgbus::Bus& bus_;

 private:
  void schedule();
  void loop_once();
  void finish();

  std::string id_;
  msgbus::Millis period_ms_;
  AgentState state_ = AgentState::kCreated;
  bool stop_requested_ = false;
  std::uint64_t iterations_ = 0;
  TraceSink trace_;
  std::shared_ptr<bool> alive_ = std::make_shared<bool>(true);
};

// Owns a set of agents and starts or stops them together.
class AgentRuntime {
 public:
  Agent& add(std::unique_ptr<Agent> agent);
  void run_all();
  void stop_all();
  bool all_stopped() const;
  Agent* find(const std::string& id) const;
  const std::vector<std::unique_ptr<Agent>>& agents() const { return agents_; }

 private:
  std::vector<std::unique_ptr<Agent>> agents_;
};

}  // namespace rai::agents
