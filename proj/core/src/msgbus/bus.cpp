#include "rai/msgbus/bus.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "rai/msgbus/ids.hpp"

namespace rai::msgbus {

using nlohmann::json;

namespace detail {

struct SubscriptionState {
  std::string topic;
  std::size_t capacity = kDefaultQueueCapacity;
  EventLoop* loop = nullptr;
  mutable std::mutex mu;
  std::deque<Envelope> queue;
  std::uint64_t dropped = 0;
  bool closed = false;

  void push(const Envelope& e) {
    std::lock_guard lock(mu);
    if (closed) return;
    if (queue.size() == capacity) {
      queue.pop_front();
      ++dropped;
    }
    queue.push_back(e);
  }
};

struct ServiceEntry {
  std::string name;
  AsyncServiceHandler handler;
};

struct PendingCall {
  std::mutex mu;
  bool done = false;
  json response;
  std::optional<std::string> error;
};

struct GoalState {
  std::string id;
  std::string action;
  mutable std::mutex mu;
  ActionStatus status = ActionStatus::kPending;
  std::vector<ActionStatus> history{ActionStatus::kPending};
  std::deque<json> feedback;
  std::size_t feedback_count = 0;
  std::optional<json> last_feedback;
  json result;
  std::uint64_t protocol_errors = 0;

  // Caller holds mu.
  void advance(ActionStatus to) {
    if (can_transition(status, to)) {
      status = to;
      history.push_back(to);
    } else {
      ++protocol_errors;
    }
  }
};

struct ServerGoalState {
  std::string id;
  std::string action;
  json goal;
  std::weak_ptr<BusCore> core;
  mutable std::mutex mu;
  ActionStatus status = ActionStatus::kExecuting;
  std::atomic<bool> cancel_requested{false};
};

struct ActionEntry {
  std::string name;
  ActionServer server;
  std::map<std::string, std::shared_ptr<ServerGoalState>> goals;
};

struct TapEntry {
  Tap tap;
};

struct BusCore : std::enable_shared_from_this<BusCore> {
  BusCore(EventLoop& l, std::uint64_t seed) : loop(l), ids(seed) {}

  EventLoop& loop;
  IdGenerator ids;

  mutable std::mutex mu;
  std::map<std::string, std::vector<std::weak_ptr<SubscriptionState>>, std::less<>> subs;
  std::map<std::string, std::shared_ptr<ServiceEntry>, std::less<>> services;
  std::map<std::string, std::shared_ptr<PendingCall>, std::less<>> pending_calls;
  std::map<std::string, std::shared_ptr<ActionEntry>, std::less<>> actions;
  std::map<std::string, std::weak_ptr<GoalState>, std::less<>> client_goals;
  std::vector<std::shared_ptr<TapEntry>> taps;
  std::map<std::string, std::string, std::less<>> aliases;

  // Caller holds mu.
  std::string resolve(std::string_view topic) const {
    auto it = aliases.find(topic);
    return it == aliases.end() ? std::string(topic) : it->second;
  }

  std::string resolve_locked(std::string_view topic) const {
    std::lock_guard lock(mu);
    return resolve(topic);
  }

  Envelope make(Kind kind, std::string topic, std::optional<std::string> corr, json payload) {
    Envelope e;
    e.kind = kind;
    e.id = ids.next();
    e.topic = std::move(topic);
    e.corr = std::move(corr);
    e.ts = loop.now_ms();
    e.payload = std::move(payload);
    return e;
  }

  void deliver(const Envelope& e);
  void deliver_pub(const Envelope& e);
  void deliver_request(const Envelope& e);
  void deliver_response(const Envelope& e);
  void deliver_goal(const Envelope& e);
  void deliver_goal_update(const Envelope& e);
  void handle_goal(const std::shared_ptr<ActionEntry>& action, const Envelope& e);
  void finish_goal(const std::shared_ptr<ServerGoalState>& goal, ActionStatus status, json result);
};

void BusCore::deliver(const Envelope& e) {
  std::vector<std::shared_ptr<TapEntry>> observers;
  {
    std::lock_guard lock(mu);
    observers = taps;
  }
  for (const auto& t : observers) t->tap(e);

  switch (e.kind) {
    case Kind::kPub:
      deliver_pub(e);
      break;
    case Kind::kSrvReq:
      deliver_request(e);
      break;
    case Kind::kSrvRes:
      deliver_response(e);
      break;
    case Kind::kActGoal:
      deliver_goal(e);
      break;
    case Kind::kActAccept:
    case Kind::kActFeedback:
    case Kind::kActResult:
      deliver_goal_update(e);
      break;
  }
}

void BusCore::deliver_pub(const Envelope& e) {
  std::lock_guard lock(mu);
  auto it = subs.find(e.topic);
  if (it == subs.end()) return;
  auto& list = it->second;
  std::erase_if(list, [](const auto& w) { return w.expired(); });
  for (const auto& weak : list) {
    if (auto sub = weak.lock()) sub->push(e);
  }
}

void BusCore::deliver_request(const Envelope& e) {
  std::shared_ptr<ServiceEntry> service;
  {
    std::lock_guard lock(mu);
    auto it = services.find(e.topic);
    if (it != services.end()) service = it->second;
  }
  ServiceResponder responder(weak_from_this(), e.topic, e.id);
  if (!service) {
    responder.fail("service not found: " + e.topic);
    return;
  }
  loop.post([service, responder, request = e.payload] {
    try {
      service->handler(request, responder);
    } catch (const std::exception& ex) {
      responder.fail(ex.what());
    } catch (...) {
      responder.fail("unknown handler error");
    }
  });
}

void BusCore::deliver_response(const Envelope& e) {
  std::shared_ptr<PendingCall> call;
  {
    std::lock_guard lock(mu);
    auto it = pending_calls.find(*e.corr);
    if (it == pending_calls.end()) return;  // caller gave up (timeout)
    call = it->second;
  }
  std::lock_guard lock(call->mu);
  if (call->done) return;
  const json& p = e.payload;
  if (p.is_object() && p.value("status", "") == "ok") {
    call->response = p.contains("response") ? p["response"] : json();
  } else {
    call->error = p.is_object() && p.contains("error") && p["error"].is_string()
                      ? p["error"].get<std::string>()
                      : std::string("malformed service response");
  }
  call->done = true;
}

void BusCore::deliver_goal(const Envelope& e) {
  std::shared_ptr<ActionEntry> action;
  {
    std::lock_guard lock(mu);
    auto it = actions.find(e.topic);
    if (it != actions.end()) action = it->second;
  }
  if (!action) {
    deliver(make(Kind::kActAccept, e.topic, e.id, json{{"accepted", false}}));
    return;
  }
  loop.post([self = shared_from_this(), action, e] { self->handle_goal(action, e); });
}

void BusCore::handle_goal(const std::shared_ptr<ActionEntry>& action, const Envelope& e) {
  bool accepted = true;
  try {
    if (action->server.accept) accepted = action->server.accept(e.payload);
  } catch (...) {
    accepted = false;
  }
  if (!accepted) {
    deliver(make(Kind::kActAccept, e.topic, e.id, json{{"accepted", false}}));
    return;
  }
  auto state = std::make_shared<ServerGoalState>();
  state->id = e.id;
  state->action = e.topic;
  state->goal = e.payload;
  state->core = weak_from_this();
  {
    std::lock_guard lock(mu);
    action->goals[e.id] = state;
  }
  deliver(make(Kind::kActAccept, e.topic, e.id, json{{"accepted", true}}));

  auto goal = std::shared_ptr<ServerGoal>(new ServerGoal(state));
  try {
    action->server.execute(goal);
  } catch (const std::exception& ex) {
    if (goal->active()) goal->abort(json{{"error", ex.what()}});
  }
}

void BusCore::finish_goal(const std::shared_ptr<ServerGoalState>& goal, ActionStatus status,
                          json result) {
  {
    std::lock_guard lock(goal->mu);
    if (goal->status != ActionStatus::kExecuting) {
      throw std::logic_error("goal " + goal->id + " is already terminal");
    }
    goal->status = status;
  }
  {
    std::lock_guard lock(mu);
    auto it = actions.find(goal->action);
    if (it != actions.end()) it->second->goals.erase(goal->id);
  }
  deliver(make(Kind::kActResult, goal->action, goal->id,
               json{{"status", std::string(to_string(status))}, {"result", std::move(result)}}));
}

void BusCore::deliver_goal_update(const Envelope& e) {
  std::shared_ptr<GoalState> goal;
  {
    std::lock_guard lock(mu);
    auto it = client_goals.find(*e.corr);
    if (it == client_goals.end()) return;
    goal = it->second.lock();
    if (!goal) {
      client_goals.erase(it);
      return;
    }
  }
  bool finished = false;
  {
    std::lock_guard lock(goal->mu);
    const json& p = e.payload;
    switch (e.kind) {
      case Kind::kActAccept:
        if (p.is_object() && p.value("accepted", false)) {
          // The server starts executing as soon as it accepts.
          goal->advance(ActionStatus::kAccepted);
          goal->advance(ActionStatus::kExecuting);
        } else {
          goal->advance(ActionStatus::kRejected);
        }
        break;
      case Kind::kActFeedback:
        if (goal->status != ActionStatus::kExecuting) {
          ++goal->protocol_errors;
          break;
        }
        if (goal->feedback.size() == kDefaultQueueCapacity) goal->feedback.pop_front();
        goal->feedback.push_back(p);
        goal->last_feedback = p;
        ++goal->feedback_count;
        break;
      case Kind::kActResult: {
        auto status = p.is_object() && p.contains("status") && p["status"].is_string()
                          ? action_status_from_string(p["status"].get<std::string>())
                          : std::nullopt;
        if (status && is_terminal(*status)) {
          goal->advance(*status);
        } else {
          goal->advance(ActionStatus::kAborted);
        }
        goal->result = p.is_object() && p.contains("result") ? p["result"] : json();
        break;
      }
      default:
        break;
    }
    finished = is_terminal(goal->status);
  }
  if (finished) {
    std::lock_guard lock(mu);
    client_goals.erase(goal->id);
  }
}

}  // namespace detail

// ---------------------------------------------------------------- Subscription

Subscription::~Subscription() { unsubscribe(); }

Subscription& Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    unsubscribe();
    state_ = std::move(other.state_);
    core_ = std::move(other.core_);
  }
  return *this;
}

const std::string& Subscription::topic() const { return state_->topic; }
std::size_t Subscription::capacity() const { return state_->capacity; }

std::size_t Subscription::size() const {
  if (!state_) return 0;
  std::lock_guard lock(state_->mu);
  return state_->queue.size();
}

std::uint64_t Subscription::dropped() const {
  std::lock_guard lock(state_->mu);
  return state_->dropped;
}

std::optional<Envelope> Subscription::try_pop() {
  if (!state_) return std::nullopt;
  std::lock_guard lock(state_->mu);
  if (state_->queue.empty()) return std::nullopt;
  Envelope e = std::move(state_->queue.front());
  state_->queue.pop_front();
  return e;
}

std::optional<Envelope> Subscription::pop(Millis timeout_ms) {
  if (!state_) return std::nullopt;
  if (auto e = try_pop()) return e;
  EventLoop& loop = *state_->loop;
  loop.run_until([this] { return size() > 0; }, loop.now_ms() + timeout_ms);
  return try_pop();
}

void Subscription::unsubscribe() {
  if (!state_) return;
  {
    std::lock_guard lock(state_->mu);
    state_->closed = true;
  }
  if (auto core = core_.lock()) {
    std::lock_guard lock(core->mu);
    auto it = core->subs.find(state_->topic);
    if (it != core->subs.end()) {
      std::erase_if(it->second, [&](const auto& w) {
        auto s = w.lock();
        return !s || s == state_;
      });
    }
  }
  state_.reset();
  core_.reset();
}

// ------------------------------------------------------------ ServiceResponder

ServiceResponder::ServiceResponder(std::weak_ptr<detail::BusCore> core, std::string service,
                                   std::string request_id)
    : core_(std::move(core)),
      service_(std::move(service)),
      request_id_(std::move(request_id)),
      answered_(std::make_shared<std::atomic<bool>>(false)) {}

void ServiceResponder::reply(json response) const {
  if (answered_->exchange(true)) return;
  auto core = core_.lock();
  if (!core) return;
  core->deliver(core->make(Kind::kSrvRes, service_, request_id_,
                           json{{"status", "ok"}, {"response", std::move(response)}}));
}

void ServiceResponder::fail(std::string message) const {
  if (answered_->exchange(true)) return;
  auto core = core_.lock();
  if (!core) return;
  core->deliver(core->make(Kind::kSrvRes, service_, request_id_,
                           json{{"status", "error"}, {"error", std::move(message)}}));
}

// ------------------------------------------------------------------ ServerGoal

const std::string& ServerGoal::id() const { return state_->id; }
const json& ServerGoal::goal() const { return state_->goal; }

ActionStatus ServerGoal::status() const {
  std::lock_guard lock(state_->mu);
  return state_->status;
}

bool ServerGoal::active() const { return status() == ActionStatus::kExecuting; }
bool ServerGoal::cancel_requested() const { return state_->cancel_requested.load(); }

void ServerGoal::publish_feedback(json feedback) {
  if (!active()) throw std::logic_error("feedback on terminal goal " + state_->id);
  auto core = state_->core.lock();
  if (!core) return;
  core->deliver(core->make(Kind::kActFeedback, state_->action, state_->id, std::move(feedback)));
}

void ServerGoal::finish(ActionStatus status, json result) {
  auto core = state_->core.lock();
  if (!core) throw std::logic_error("bus is gone");
  core->finish_goal(state_, status, std::move(result));
}

void ServerGoal::succeed(json result) { finish(ActionStatus::kSucceeded, std::move(result)); }
void ServerGoal::abort(json result) { finish(ActionStatus::kAborted, std::move(result)); }
void ServerGoal::cancel(json result) { finish(ActionStatus::kCanceled, std::move(result)); }

// ------------------------------------------------------------------ GoalHandle

const std::string& GoalHandle::id() const { return state_->id; }
const std::string& GoalHandle::action() const { return state_->action; }

ActionStatus GoalHandle::status() const {
  std::lock_guard lock(state_->mu);
  return state_->status;
}

bool GoalHandle::accepted() const {
  std::lock_guard lock(state_->mu);
  return std::find(state_->history.begin(), state_->history.end(), ActionStatus::kAccepted) !=
         state_->history.end();
}

bool GoalHandle::terminal() const { return is_terminal(status()); }

std::vector<ActionStatus> GoalHandle::history() const {
  std::lock_guard lock(state_->mu);
  return state_->history;
}

std::size_t GoalHandle::feedback_count() const {
  std::lock_guard lock(state_->mu);
  return state_->feedback_count;
}

std::optional<json> GoalHandle::last_feedback() const {
  std::lock_guard lock(state_->mu);
  return state_->last_feedback;
}

std::optional<json> GoalHandle::pop_feedback() {
  std::lock_guard lock(state_->mu);
  if (state_->feedback.empty()) return std::nullopt;
  json f = std::move(state_->feedback.front());
  state_->feedback.pop_front();
  return f;
}

std::pair<ActionStatus, json> GoalHandle::await_result(Millis timeout_ms) {
  auto core = core_.lock();
  if (!terminal()) {
    if (!core) throw Timeout("bus is gone");
    core->loop.run_until([this] { return terminal(); }, core->loop.now_ms() + timeout_ms);
  }
  if (!terminal()) throw Timeout("no result for goal " + state_->id);
  std::lock_guard lock(state_->mu);
  return {state_->status, state_->result};
}

json GoalHandle::result() const {
  std::lock_guard lock(state_->mu);
  return is_terminal(state_->status) ? state_->result : json();
}

// ------------------------------------------------------------------------- Bus

std::string cancel_service_name(std::string_view action) {
  return std::string(action) + "/_cancel";
}

Bus::Bus(EventLoop& loop, std::uint64_t seed)
    : core_(std::make_shared<detail::BusCore>(loop, seed)) {}

Bus::~Bus() = default;

EventLoop& Bus::loop() const { return core_->loop; }
std::string Bus::next_id() { return core_->ids.next(); }

void Bus::publish(std::string_view topic, json payload) {
  validate_topic(topic);
  core_->deliver(core_->make(Kind::kPub, core_->resolve_locked(topic), std::nullopt,
                             std::move(payload)));
}

Subscription Bus::subscribe(std::string_view topic, std::size_t capacity) {
  validate_topic(topic);
  if (capacity == 0) throw std::invalid_argument("subscription capacity must be positive");
  auto state = std::make_shared<detail::SubscriptionState>();
  state->capacity = capacity;
  state->loop = &core_->loop;
  {
    std::lock_guard lock(core_->mu);
    state->topic = core_->resolve(topic);
    core_->subs[state->topic].push_back(state);
  }
  return Subscription(std::move(state), core_);
}

Registration Bus::register_service(std::string_view name, ServiceHandler handler) {
  if (!handler) throw std::invalid_argument("service handler is empty");
  return register_async_service(
      name, [handler = std::move(handler)](const json& request, ServiceResponder responder) {
        responder.reply(handler(request));
      });
}

Registration Bus::register_async_service(std::string_view name, AsyncServiceHandler handler) {
  validate_topic(name);
  if (!handler) throw std::invalid_argument("service handler is empty");
  auto entry = std::make_shared<detail::ServiceEntry>();
  entry->name = std::string(name);
  entry->handler = std::move(handler);
  {
    std::lock_guard lock(core_->mu);
    if (core_->services.contains(entry->name)) {
      throw DuplicateService("service already registered: " + entry->name);
    }
    core_->services[entry->name] = entry;
  }
  return Registration([weak = std::weak_ptr(core_), entry] {
    if (auto core = weak.lock()) {
      std::lock_guard lock(core->mu);
      auto it = core->services.find(entry->name);
      if (it != core->services.end() && it->second == entry) core->services.erase(it);
    }
  });
}

bool Bus::has_service(std::string_view name) const {
  std::lock_guard lock(core_->mu);
  return core_->services.find(name) != core_->services.end();
}

json Bus::call_service(std::string_view name, json request, Millis timeout_ms) {
  validate_topic(name);
  if (timeout_ms <= 0) throw std::invalid_argument("service timeout must be positive");
  auto call = std::make_shared<detail::PendingCall>();
  Envelope req = core_->make(Kind::kSrvReq, std::string(name), std::nullopt, std::move(request));
  {
    std::lock_guard lock(core_->mu);
    if (core_->services.find(name) == core_->services.end()) {
      throw ServiceNotFound("service not found: " + std::string(name));
    }
    core_->pending_calls[req.id] = call;
  }
  const auto is_done = [call] {
    std::lock_guard lock(call->mu);
    return call->done;
  };
  core_->deliver(req);
  EventLoop& loop = core_->loop;
  loop.run_until(is_done, loop.now_ms() + timeout_ms);
  {
    std::lock_guard lock(core_->mu);
    core_->pending_calls.erase(req.id);
  }
  std::lock_guard lock(call->mu);
  if (!call->done) {
    call->done = true;
    throw Timeout("service " + std::string(name) + " did not respond within " +
                  std::to_string(timeout_ms) + " ms");
  }
  if (call->error) throw HandlerError(*call->error);
  return std::move(call->response);
}

Registration Bus::register_action_server(std::string_view name, ActionServer server) {
  validate_topic(name);
  if (!server.execute) throw std::invalid_argument("action server needs an execute callback");
  auto entry = std::make_shared<detail::ActionEntry>();
  entry->name = std::string(name);
  entry->server = std::move(server);
  {
    std::lock_guard lock(core_->mu);
    if (core_->actions.contains(entry->name)) {
      throw DuplicateService("action server already registered: " + entry->name);
    }
    core_->actions[entry->name] = entry;
  }

  std::weak_ptr<detail::BusCore> weak = core_;
  Registration cancel;
  try {
    cancel = register_service(cancel_service_name(name), [weak, entry](const json& request) {
      auto core = weak.lock();
      if (!core || !request.is_object() || !request.contains("goal_id") ||
          !request["goal_id"].is_string()) {
        return json{{"accepted", false}};
      }
      std::shared_ptr<detail::ServerGoalState> goal;
      {
        std::lock_guard lock(core->mu);
        auto it = entry->goals.find(request["goal_id"].get<std::string>());
        if (it != entry->goals.end()) goal = it->second;
      }
      if (!goal) return json{{"accepted", false}};
      {
        std::lock_guard lock(goal->mu);
        if (goal->status != ActionStatus::kExecuting) return json{{"accepted", false}};
      }
      goal->cancel_requested = true;
      if (entry->server.on_cancel) {
        ServerGoal view(goal);
        entry->server.on_cancel(view);
      }
      return json{{"accepted", true}};
    });
  } catch (...) {
    std::lock_guard lock(core_->mu);
    core_->actions.erase(entry->name);
    throw;
  }

  auto cancel_holder = std::make_shared<Registration>(std::move(cancel));
  return Registration([weak, entry, cancel_holder] {
    cancel_holder->reset();
    if (auto core = weak.lock()) {
      std::lock_guard lock(core->mu);
      auto it = core->actions.find(entry->name);
      if (it != core->actions.end() && it->second == entry) core->actions.erase(it);
    }
  });
}

bool Bus::has_action_server(std::string_view name) const {
  std::lock_guard lock(core_->mu);
  return core_->actions.find(name) != core_->actions.end();
}

GoalHandle Bus::send_goal(std::string_view action, json goal, Millis accept_timeout_ms) {
  validate_topic(action);
  {
    std::lock_guard lock(core_->mu);
    if (core_->actions.find(action) == core_->actions.end()) {
      throw ActionServerNotFound("no action server on " + std::string(action));
    }
  }
  auto state = std::make_shared<detail::GoalState>();
  Envelope e = core_->make(Kind::kActGoal, std::string(action), std::nullopt, std::move(goal));
  state->id = e.id;
  state->action = e.topic;
  {
    std::lock_guard lock(core_->mu);
    core_->client_goals[state->id] = state;
  }
  GoalHandle handle(state, core_);
  core_->deliver(e);
  EventLoop& loop = core_->loop;
  loop.run_until([&handle] { return handle.status() != ActionStatus::kPending; },
                 loop.now_ms() + accept_timeout_ms);
  if (handle.status() == ActionStatus::kPending) {
    std::lock_guard lock(core_->mu);
    core_->client_goals.erase(state->id);
    throw Timeout("no acceptance decision for goal on " + std::string(action));
  }
  return handle;
}

bool Bus::request_cancel(const GoalHandle& handle) {
  if (!handle) throw std::invalid_argument("empty goal handle");
  const ActionStatus status = handle.status();
  if (is_terminal(status)) {
    throw AlreadyTerminal("goal " + handle.id() + " is already " + std::string(to_string(status)));
  }
  json response = call_service(cancel_service_name(handle.action()),
                               json{{"goal_id", handle.id()}}, kDefaultActionWaitMs);
  return response.is_object() && response.value("accepted", false);
}

ActionStatus Bus::cancel_goal(GoalHandle& handle, Millis timeout_ms) {
  request_cancel(handle);
  EventLoop& loop = core_->loop;
  loop.run_until([&handle] { return handle.terminal(); }, loop.now_ms() + timeout_ms);
  if (!handle.terminal()) throw Timeout("goal " + handle.id() + " did not terminate after cancel");
  return handle.status();
}

Registration Bus::add_tap(Tap tap) {
  auto entry = std::make_shared<detail::TapEntry>();
  entry->tap = std::move(tap);
  {
    std::lock_guard lock(core_->mu);
    core_->taps.push_back(entry);
  }
  return Registration([weak = std::weak_ptr(core_), entry] {
    if (auto core = weak.lock()) {
      std::lock_guard lock(core->mu);
      std::erase(core->taps, entry);
    }
  });
}

void Bus::add_alias(std::string_view alias, std::string_view canonical) {
  validate_topic(alias);
  validate_topic(canonical);
  std::lock_guard lock(core_->mu);
  core_->aliases[std::string(alias)] = std::string(canonical);
}

void Bus::inject(Envelope envelope) {
  {
    std::lock_guard lock(core_->mu);
    envelope.topic = core_->resolve(envelope.topic);
  }
  core_->deliver(envelope);
}

}  // namespace rai::msgbus
