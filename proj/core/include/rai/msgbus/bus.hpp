#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/msgbus/action_status.hpp"
#include "rai/msgbus/envelope.hpp"
#include "rai/msgbus/errors.hpp"
#include "rai/msgbus/event_loop.hpp"

namespace rai::msgbus {

inline constexpr std::size_t kDefaultQueueCapacity = 256;
inline constexpr Millis kDefaultActionWaitMs = 5000;

namespace detail {
struct BusCore;
struct SubscriptionState;
struct ServiceEntry;
struct GoalState;
struct ServerGoalState;
struct ActionEntry;
struct TapEntry;
}  // namespace detail

// Single-consumer FIFO fed by publishes on one topic. Bounded; when full the
// oldest message is dropped. Destroying the subscription unsubscribes.
class Subscription {
 public:
  Subscription() = default;
  ~Subscription();
  Subscription(Subscription&&) noexcept = default;
  Subscription& operator=(Subscription&& other) noexcept;
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;

  explicit operator bool() const { return state_ != nullptr; }

  const std::string& topic() const;
  std::size_t capacity() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::uint64_t dropped() const;

  std::optional<Envelope> try_pop();
  // Drives the event loop for up to `timeout_ms` waiting for a message.
  std::optional<Envelope> pop(Millis timeout_ms);

  void unsubscribe();

 private:
  friend class Bus;
  Subscription(std::shared_ptr<detail::SubscriptionState> state,
               std::weak_ptr<detail::BusCore> core)
      : state_(std::move(state)), core_(std::move(core)) {}

  std::shared_ptr<detail::SubscriptionState> state_;
  std::weak_ptr<detail::BusCore> core_;
};

// Lets a service answer later (for example from a timed task). The first
// reply or failure wins; later calls are ignored.
class ServiceResponder {
 public:
  void reply(nlohmann::json response) const;
  void fail(std::string message) const;
  const std::string& request_id() const { return request_id_; }

 private:
  friend class Bus;
  friend struct detail::BusCore;
  ServiceResponder(std::weak_ptr<detail::BusCore> core, std::string service,
                   std::string request_id);

  std::weak_ptr<detail::BusCore> core_;
  std::string service_;
  std::string request_id_;
  std::shared_ptr<std::atomic<bool>> answered_;
};

using ServiceHandler = std::function<nlohmann::json(const nlohmann::json& request)>;
using AsyncServiceHandler =
    std::function<void(const nlohmann::json& request, ServiceResponder responder)>;

// RAII registration; dropping it deregisters the endpoint.
class Registration {
 public:
  Registration() = default;
  ~Registration() { reset(); }
  Registration(Registration&& other) noexcept : release_(std::exchange(other.release_, {})) {}
  Registration& operator=(Registration&& other) noexcept {
    if (this != &other) {
      reset();
      release_ = std::exchange(other.release_, {});
    }
    return *this;
  }
  Registration(const Registration&) = delete;
  Registration& operator=(const Registration&) = delete;

  void reset() {
    if (release_) std::exchange(release_, {})();
  }
  explicit operator bool() const { return static_cast<bool>(release_); }

 private:
  friend class Bus;
  explicit Registration(std::function<void()> release) : release_(std::move(release)) {}
  std::function<void()> release_;
};

// Server-side view of one accepted goal.
class ServerGoal {
 public:
  const std::string& id() const;
  const nlohmann::json& goal() const;
  ActionStatus status() const;
  bool active() const;
  bool cancel_requested() const;

  void publish_feedback(nlohmann::json feedback);
  // Terminal transitions; each throws std::logic_error once the goal is done.
  void succeed(nlohmann::json result = nlohmann::json::object());
  void abort(nlohmann::json result = nlohmann::json::object());
  void cancel(nlohmann::json result = nlohmann::json::object());

 private:
  friend class Bus;
  friend struct detail::BusCore;
  explicit ServerGoal(std::shared_ptr<detail::ServerGoalState> state) : state_(std::move(state)) {}
  void finish(ActionStatus status, nlohmann::json result);
  std::shared_ptr<detail::ServerGoalState> state_;
};

struct ActionServer {
  // Empty means accept every goal.
  std::function<bool(const nlohmann::json& goal)> accept;
  // Called once per accepted goal; the server drives the goal to a terminal
  // state, typically from tasks it posts on the event loop.
  std::function<void(std::shared_ptr<ServerGoal> goal)> execute;
  // Optional hook run when a cancel request reaches an active goal.
  std::function<void(ServerGoal& goal)> on_cancel;
};

// Client-side handle on a goal sent with Bus::send_goal.
class GoalHandle {
 public:
  GoalHandle() = default;

  explicit operator bool() const { return state_ != nullptr; }
  const std::string& id() const;
  const std::string& action() const;
  ActionStatus status() const;
  bool accepted() const;
  bool terminal() const;
  // Every status observed, in order, starting with PENDING.
  std::vector<ActionStatus> history() const;

  std::size_t feedback_count() const;
  std::optional<nlohmann::json> last_feedback() const;
  // Feedback queue; bounded like a subscription.
  std::optional<nlohmann::json> pop_feedback();

  // Drives the loop until a terminal status arrives. Throws Timeout.
  std::pair<ActionStatus, nlohmann::json> await_result(Millis timeout_ms = kDefaultActionWaitMs);
  // Result document once terminal, null before.
  nlohmann::json result() const;

 private:
  friend class Bus;
  friend struct detail::BusCore;
  GoalHandle(std::shared_ptr<detail::GoalState> state, std::weak_ptr<detail::BusCore> core)
      : state_(std::move(state)), core_(std::move(core)) {}
  std::shared_ptr<detail::GoalState> state_;
  std::weak_ptr<detail::BusCore> core_;
};

// Observer of every envelope routed through the bus.
using Tap = std::function<void(const Envelope&)>;

// In-process connector offering the three communication modes over one topic
// namespace; every message is routed as an Envelope dispatched on its kind.
class Bus {
 public:
  Bus(EventLoop& loop, std::uint64_t seed);
  ~Bus();
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  EventLoop& loop() const;
  std::string next_id();

  // Best-effort: no delivery confirmation; zero subscribers is fine.
  void publish(std::string_view topic, nlohmann::json payload);
  // Only messages published after this call are received.
  Subscription subscribe(std::string_view topic, std::size_t capacity = kDefaultQueueCapacity);

  Registration register_service(std::string_view name, ServiceHandler handler);
  Registration register_async_service(std::string_view name, AsyncServiceHandler handler);
  bool has_service(std::string_view name) const;
  // Throws ServiceNotFound, Timeout or HandlerError.
  nlohmann::json call_service(std::string_view name, nlohmann::json request, Millis timeout_ms);

  // Also registers the cancel service `<name>/_cancel`.
  Registration register_action_server(std::string_view name, ActionServer server);
  bool has_action_server(std::string_view name) const;
  // Resolves to ACCEPTED (then EXECUTING) or REJECTED before returning.
  // Throws ActionServerNotFound.
  GoalHandle send_goal(std::string_view action, nlohmann::json goal,
                       Millis accept_timeout_ms = kDefaultActionWaitMs);
  // Asks the server to cancel without waiting for the outcome. Returns whether
  // the server still held the goal. Throws AlreadyTerminal.
  bool request_cancel(const GoalHandle& handle);
  // request_cancel, then waits for the terminal status.
  ActionStatus cancel_goal(GoalHandle& handle, Millis timeout_ms = kDefaultActionWaitMs);

  Registration add_tap(Tap tap);
  // Publishes and subscriptions on `alias` are routed to `canonical`.
  void add_alias(std::string_view alias, std::string_view canonical);

  // Routes an envelope produced elsewhere (e.g. received from a remote peer).
  void inject(Envelope envelope);

 private:
  std::shared_ptr<detail::BusCore> core_;
};

std::string cancel_service_name(std::string_view action);

}  // namespace rai::msgbus
