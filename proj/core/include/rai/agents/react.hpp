#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rai/agents/agent.hpp"
#include "rai/llm/provider.hpp"
#include "rai/toolkit/context.hpp"
#include "rai/toolkit/tool.hpp"

namespace rai::agents {

inline constexpr int kDefaultMaxSteps = 16;
inline constexpr const char* kStepLimitText = "step limit reached";

struct ReactConfig {
  llm::ChatProvider* provider = nullptr;
  const toolkit::ToolRegistry* tools = nullptr;
  int max_steps = kDefaultMaxSteps;
  llm::CompletionParams params;
};

enum class ReactStatus { kCompleted, kFailed, kStopped };

std::string_view to_string(ReactStatus status);

struct ReactResult {
  ReactStatus status = ReactStatus::kFailed;
  // The model's final text, or kStepLimitText / the error on failure.
  std::string final_text;
  // Everything after the system message, in order.
  std::vector<llm::ChatMessage> transcript;
  int model_calls = 0;
  int tool_calls = 0;
  std::string error;
  // Set when the provider ran out of scripted replies.
  bool script_exhausted = false;
};

// Reason-act loop: ask the model; run each returned tool call in listed
// order and feed the outcomes back; stop on final text. At most
// config.max_steps model calls. Provider errors end the loop FAILED. The
// stop predicate is checked before every model call.
ReactResult react_loop(const ReactConfig& config, std::vector<llm::ChatMessage> conversation,
                       toolkit::ToolContext& context, const std::function<bool()>& stop_requested = {},
                       const std::function<void(const std::string&, const nlohmann::json&)>& trace = {});

}  // namespace rai::agents
