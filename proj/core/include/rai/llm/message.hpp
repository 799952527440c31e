#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/toolkit/tool.hpp"

namespace rai::llm {

using toolkit::ContentPart;
using toolkit::ToolCall;

enum class Role { kSystem, kUser, kAssistant, kTool };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ChatMessage {
  Role role = Role::kUser;
  std::vector<ContentPart> parts;
  // Set only on TOOL messages.
  std::optional<std::string> tool_call_id;
  // Set only on ASSISTANT messages.
  std::vector<ToolCall> tool_calls;

  static ChatMessage system(std::string text);
  static ChatMessage user(std::string text);
  static ChatMessage assistant(std::string text);
  static ChatMessage assistant_calls(std::vector<ToolCall> calls);
  static ChatMessage tool(const toolkit::ToolOutcome& outcome);

  std::string text() const;
  std::size_t image_count() const;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Exactly one of final_text / tool_calls is set.
struct ModelReply {
  std::optional<std::string> final_text;
  std::vector<ToolCall> tool_calls;

  bool is_final() const { return final_text.has_value(); }
  static ModelReply text(std::string text);
  static ModelReply calls(std::vector<ToolCall> calls);
  friend bool operator==(const ModelReply&, const ModelReply&) = default;
};

struct CompletionParams {
  std::string model;
  double temperature = 0.0;
  int max_output = 1024;
};

nlohmann::json to_json(const ContentPart& part);
nlohmann::json to_json(const ToolCall& call);
nlohmann::json to_json(const ChatMessage& message);
nlohmann::json to_json(const ModelReply& reply);
ChatMessage message_from_json(const nlohmann::json& j);
ModelReply reply_from_json(const nlohmann::json& j);

// Checks the conversation invariants: first message SYSTEM or USER, TOOL
// messages answer an earlier assistant call, images only in USER or TOOL
// messages. Returns the first problem found.
std::optional<std::string> check_conversation(const std::vector<ChatMessage>& messages);

}  // namespace rai::llm
