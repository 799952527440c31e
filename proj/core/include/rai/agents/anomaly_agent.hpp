#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rai/agents/agent.hpp"
#include "rai/agents/react.hpp"
#include "rai/agents/records.hpp"
#include "rai/whoami/bundle.hpp"

namespace rai::agents {

inline constexpr const char* kFailSafeResolution = "abort_task";

struct AnomalyConfig {
  std::string system_prompt;
  std::shared_ptr<llm::ChatProvider> provider;
  int max_steps = kDefaultMaxSteps;
  llm::CompletionParams params;
  whoami::EmbodimentCondition condition;
  std::shared_ptr<const whoami::IdentityBundle> identity;
};

// Decides how the tractor should handle an obstacle. Every AnomalyEvent gets
// its own one-shot ReAct session whose only tools are the five resolutions;
// the first one called is published on anomaly/resolutions. A session that
// ends without a choice publishes abort_task.
class AnomalyAgent : public Agent {
 public:
  AnomalyAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, AnomalyConfig config);

  std::size_t handled() const { return handled_; }
  const toolkit::ToolRegistry& tools() const { return tools_; }

 protected:
  void iterate() override;

 private:
  void handle(const AnomalyEvent& event);

  AnomalyConfig config_;
  toolkit::ToolRegistry tools_;
  toolkit::ToolContext context_;
  msgbus::Subscription events_;
  std::optional<std::string> choice_;
  std::string choice_reason_;
  std::size_t handled_ = 0;
};

// The user turn that opens an anomaly session.
std::string describe_anomaly(const AnomalyEvent& event);

}  // namespace rai::agents
