#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rai/agents/agent.hpp"
#include "rai/agents/react.hpp"
#include "rai/whoami/bundle.hpp"

namespace rai::agents {

struct ConversationalConfig {
  std::string system_prompt;
  std::shared_ptr<const toolkit::ToolRegistry> tools;
  std::shared_ptr<llm::ChatProvider> provider;
  int max_steps = kDefaultMaxSteps;
  llm::CompletionParams params;
  std::string inbox_topic = "hri/in";
  std::string outbox_topic = "hri/out";
  whoami::EmbodimentCondition condition;
  std::shared_ptr<const whoami::IdentityBundle> identity;

  // Throws std::invalid_argument: missing provider or tools, max_steps < 1,
  // inbox equal to outbox.
  void validate() const;
};

// ReAct agent serving a chat channel. Each iteration answers every message
// waiting on the inbox, in arrival order; replies {"text", "status"} go to the
// outbox. The conversation history carries over between turns.
class ConversationalAgent : public Agent {
 public:
  ConversationalAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, ConversationalConfig config);

  const std::vector<llm::ChatMessage>& history() const { return history_; }
  std::size_t turns() const { return turns_; }
  toolkit::ToolContext& tool_context() { return context_; }

 protected:
  void iterate() override;
  // Runs at the start of every iteration, before any turn.
  virtual void before_turns() {}

  const ConversationalConfig& config() const { return config_; }
  // Iteration count when the envelope passed through the bus; -1 if unseen.
  std::int64_t arrival_iteration(const std::string& envelope_id) const;
  void note_arrival(const msgbus::Envelope& e);

 private:
  void answer(const msgbus::Envelope& message);

  ConversationalConfig config_;
  toolkit::ToolContext context_;
  msgbus::Subscription inbox_;
  msgbus::Registration arrivals_;
  std::map<std::string, std::int64_t> arrived_at_;
  std::vector<llm::ChatMessage> history_;
  std::size_t turns_ = 0;
};

// Text of a chat payload: a string, or the "text" field of an object.
std::string chat_text(const nlohmann::json& payload);

}  // namespace rai::agents
