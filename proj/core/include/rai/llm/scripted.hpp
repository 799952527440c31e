#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/llm/provider.hpp"

namespace rai::llm {

struct ScriptEntry {
  // Substring that must occur in the latest message's match text.
  std::optional<std::string> contains;
  ModelReply reply;
};

// Replays a fixture of canned replies. Each completion fires the first
// unconsumed entry whose predicate matches the latest message; entries that
// do not match stay queued. With nothing left to fire, throws
// ScriptExhausted.
class ScriptedProvider : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<ScriptEntry> entries);

  // Fixture document: [{"when": {"contains": text}?, "reply": {"text": ...} |
  // {"tool_calls": [{"name", "arguments", "id"?}]}}]. Throws
  // std::invalid_argument on a malformed fixture.
  static std::vector<ScriptEntry> parse(const nlohmann::json& fixture);
  static std::unique_ptr<ScriptedProvider> from_file(const std::filesystem::path& path);

  ModelReply complete(const std::vector<ChatMessage>& messages,
                      const std::vector<toolkit::ToolSpec>& tools,
                      const CompletionParams& params) override;

  std::size_t calls() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<ScriptEntry> entries_;
  std::vector<bool> consumed_;
  std::size_t calls_ = 0;
};

// Text a predicate is matched against: the message's text parts followed by
// one "[image:<asset id>]" marker per image part.
std::string match_text(const ChatMessage& message);

// Passes completions through to another provider and keeps every reply, so a
// live session can be saved as a fixture and replayed.
class RecordingProvider : public ChatProvider {
 public:
  explicit RecordingProvider(ChatProvider& inner) : inner_(inner) {}

  ModelReply complete(const std::vector<ChatMessage>& messages,
                      const std::vector<toolkit::ToolSpec>& tools,
                      const CompletionParams& params) override;

  // Fixture without predicates; replies fire in recorded order.
  nlohmann::json fixture() const;

 private:
  ChatProvider& inner_;
  mutable std::mutex mu_;
  std::vector<ModelReply> replies_;
};

}  // namespace rai::llm
