#include "rai/agents/conversational.hpp"

namespace rai::agents {

using nlohmann::json;

void ConversationalConfig::validate() const {
  if (!provider) throw std::invalid_argument("conversational agent needs a provider");
  if (!tools) throw std::invalid_argument("conversational agent needs a tool registry");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (inbox_topic == outbox_topic) throw std::invalid_argument("inbox and outbox must differ: " + inbox_topic);
}

std::string chat_text(const json& payload) {
  if (payload.is_string()) return payload.get<std::string>();
  if (payload.is_object() && payload.contains("text") && payload["text"].is_string()) {
    return payload["text"].get<std::string>();
  }
  return payload.dump();
}

ConversationalAgent::ConversationalAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms,
                                         ConversationalConfig config)
    : Agent(std::move(id), bus, period_ms), config_(std::move(config)) {
  config_.validate();
  context_.bus = &bus_;
  context_.identity = config_.identity.get();
  inbox_ = bus_.subscribe(config_.inbox_topic);
  arrivals_ = bus_.add_tap([this](const msgbus::Envelope& e) {
    if (e.kind == msgbus::Kind::kPub && e.topic == inbox_.topic()) note_arrival(e);
  });
}

void ConversationalAgent::note_arrival(const msgbus::Envelope& e) {
  arrived_at_[e.id] = static_cast<std::int64_t>(iterations());
}

std::int64_t ConversationalAgent::arrival_iteration(const std::string& envelope_id) const {
  auto it = arrived_at_.find(envelope_id);
  return it == arrived_at_.end() ? -1 : it->second;
}

void ConversationalAgent::iterate() {
  before_turns();
  while (!stop_requested()) {
    auto message = inbox_.try_pop();
    if (!message) break;
    answer(*message);
  }
}

void ConversationalAgent::answer(const msgbus::Envelope& message) {
  const std::string text = chat_text(message.payload);
  std::vector<llm::ChatMessage> conversation;
  if (history_.empty()) {
    conversation = whoami::open_conversation(config_.system_prompt, config_.condition, text);
  } else {
    conversation = history_;
    conversation.push_back(llm::ChatMessage::user(text));
  }

  ReactConfig rc{config_.provider.get(), config_.tools.get(), config_.max_steps, config_.params};
  auto sink = [this](const std::string& kind, const json& payload) { trace(kind, payload); };
  ReactResult result = react_loop(rc, conversation, context_, [this] { return stop_requested(); }, sink);

  history_.clear();
  history_.push_back(conversation.front());
  history_.insert(history_.end(), result.transcript.begin(), result.transcript.end());
  ++turns_;

  if (result.status != ReactStatus::kStopped) {
    bus_.publish(config_.outbox_topic, json{{"text", result.final_text}, {"status", to_string(result.status)}});
  }
  const auto arrival = arrival_iteration(message.id);
  const auto answered = static_cast<std::int64_t>(iterations());
  trace("turn", {{"message_id", message.id},
                 {"text", text},
                 {"reply", result.final_text},
                 {"status", to_string(result.status)},
                 {"model_calls", result.model_calls},
                 {"arrival_iteration", arrival},
                 {"answered_iteration", answered},
                 {"latency_iterations", arrival < 0 ? -1 : answered - arrival}});
  arrived_at_.erase(message.id);
}

}  // namespace rai::agents
