#pragma once

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rai::agents {

inline constexpr const char* kNoTransition = "NoTransition";

enum class FsmStatus { kRunning, kDone, kFailed };

struct FsmRun {
  FsmStatus status = FsmStatus::kRunning;
  std::string state;
  std::vector<std::string> path;
  std::string error;
};

// Finite state machine over a context type. Each state has an entry action
// that returns an event; transitions out of a state are tried in declaration
// order and the first whose predicate accepts the event fires. Terminal
// states run their entry action on arrival and end the run.
template <class Context>
class StateMachine {
 public:
  using Action = std::function<std::string(Context&)>;
  using Predicate = std::function<bool(const std::string& event, const Context&)>;

  struct Transition {
    std::string from;
    Predicate when;
    std::string to;
  };

  StateMachine& state(const std::string& name, Action entry, bool terminal = false) {
    if (states_.count(name) != 0) throw std::invalid_argument("duplicate state " + name);
    states_[name] = std::move(entry);
    if (terminal) terminal_.insert(name);
    if (initial_.empty()) initial_ = name;
    return *this;
  }

  StateMachine& initial(const std::string& name) {
    initial_ = name;
    return *this;
  }

  StateMachine& transition(const std::string& from, Predicate when, const std::string& to) {
    transitions_.push_back({from, std::move(when), to});
    return *this;
  }

  // Fires when the event equals `event`.
  StateMachine& on(const std::string& from, const std::string& event, const std::string& to) {
    return transition(from, [event](const std::string& e, const Context&) { return e == event; }, to);
  }

  StateMachine& always(const std::string& from, const std::string& to) {
    return transition(from, [](const std::string&, const Context&) { return true; }, to);
  }

  // Throws std::invalid_argument if the initial state or a transition
  // endpoint is undeclared.
  void validate() const {
    if (states_.count(initial_) == 0) throw std::invalid_argument("initial state '" + initial_ + "' not declared");
    for (const auto& t : transitions_) {
      if (states_.count(t.from) == 0) throw std::invalid_argument("transition from unknown state " + t.from);
      if (states_.count(t.to) == 0) throw std::invalid_argument("transition to unknown state " + t.to);
    }
  }

  bool is_terminal(const std::string& name) const { return terminal_.count(name) != 0; }
  bool has_edge(const std::string& from, const std::string& to) const {
    for (const auto& t : transitions_) {
      if (t.from == from && t.to == to) return true;
    }
    return false;
  }

  FsmRun begin() const {
    validate();
    return {FsmStatus::kRunning, initial_, {initial_}, {}};
  }

  // Runs the current state's entry action and follows one transition. A
  // terminal target's entry action runs before returning.
  void step(FsmRun& run, Context& ctx) const {
    if (run.status != FsmStatus::kRunning) return;
    const std::string event = states_.at(run.state)(ctx);
    const Transition* fired = nullptr;
    for (const auto& t : transitions_) {
      if (t.from == run.state && t.when(event, ctx)) {
        fired = &t;
        break;
      }
    }
    if (fired == nullptr) {
      run.status = FsmStatus::kFailed;
      run.error = std::string(kNoTransition) + ": no transition from " + run.state + " on event '" + event + "'";
      return;
    }
    run.state = fired->to;
    run.path.push_back(run.state);
    if (is_terminal(run.state)) {
      states_.at(run.state)(ctx);
      run.status = FsmStatus::kDone;
    }
  }

  // Steps until a terminal state or a missing transition; the latter ends
  // FAILED with a kNoTransition error and the path walked so far.
  FsmRun run(Context& ctx, std::size_t max_steps = 10000) const {
    FsmRun r = begin();
    if (is_terminal(r.state)) {
      states_.at(r.state)(ctx);
      r.status = FsmStatus::kDone;
      return r;
    }
    for (std::size_t i = 0; i < max_steps && r.status == FsmStatus::kRunning; ++i) step(r, ctx);
    if (r.status == FsmStatus::kRunning) {
      r.status = FsmStatus::kFailed;
      r.error = "step budget exhausted";
    }
    return r;
  }

 private:
  std::map<std::string, Action> states_;
  std::set<std::string> terminal_;
  std::vector<Transition> transitions_;
  std::string initial_;
};

}  // namespace rai::agents
