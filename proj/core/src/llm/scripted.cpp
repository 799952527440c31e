#include "rai/llm/scripted.hpp"

#include <fstream>
#include <stdexcept>

namespace rai::llm {

using nlohmann::json;

std::vector<ScriptEntry> ScriptedProvider::parse(const json& fixture) {
  if (!fixture.is_array()) throw std::invalid_argument("script fixture must be a list");
  std::vector<ScriptEntry> out;
  for (std::size_t i = 0; i < fixture.size(); ++i) {
    const json& item = fixture[i];
    const std::string where = "script entry " + std::to_string(i) + ": ";
    if (!item.is_object() || !item.contains("reply")) throw std::invalid_argument(where + "missing reply");
    for (auto it = item.begin(); it != item.end(); ++it) {
      if (it.key() != "when" && it.key() != "reply") {
        throw std::invalid_argument(where + "unknown field '" + it.key() + "'");
      }
    }
    ScriptEntry entry;
    if (item.contains("when")) {
      const json& when = item["when"];
      if (!when.is_object() || !when.contains("contains") || !when["contains"].is_string()) {
        throw std::invalid_argument(where + "'when' needs a 'contains' string");
      }
      entry.contains = when["contains"].get<std::string>();
    }
    try {
      entry.reply = reply_from_json(item["reply"]);
    } catch (const std::exception& ex) {
      throw std::invalid_argument(where + ex.what());
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open script " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& ex) {
    throw std::invalid_argument("script " + path.string() + ": " + ex.what());
  }
  return std::make_unique<ScriptedProvider>(parse(doc));
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries)
    : entries_(std::move(entries)), consumed_(entries_.size(), false) {}

std::string match_text(const ChatMessage& message) {
  std::string out = message.text();
  for (const auto& p : message.parts) {
    if (p.type == toolkit::ContentPart::Type::kImage) out += "[image:" + p.image_ref + "]";
  }
  return out;
}

ModelReply ScriptedProvider::complete(const std::vector<ChatMessage>& messages,
                                      const std::vector<toolkit::ToolSpec>& tools,
                                      const CompletionParams&) {
  check_request(messages);
  const std::string latest = match_text(messages.back());
  std::lock_guard lock(mu_);
  const std::size_t call_index = calls_++;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (consumed_[i]) continue;
    const auto& entry = entries_[i];
    if (entry.contains && latest.find(*entry.contains) == std::string::npos) continue;
    consumed_[i] = true;
    ModelReply reply = entry.reply;
    for (std::size_t k = 0; k < reply.tool_calls.size(); ++k) {
      if (reply.tool_calls[k].id.empty()) {
        reply.tool_calls[k].id = "call_" + std::to_string(call_index) + "_" + std::to_string(k);
      }
    }
    check_reply(reply, tools);
    return reply;
  }
  throw ScriptExhausted("script exhausted after " + std::to_string(call_index) + " completions");
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (bool c : consumed_) n += c ? 0 : 1;
  return n;
}

ModelReply RecordingProvider::complete(const std::vector<ChatMessage>& messages,
                                       const std::vector<toolkit::ToolSpec>& tools,
                                       const CompletionParams& params) {
  ModelReply reply = inner_.complete(messages, tools, params);
  std::lock_guard lock(mu_);
  replies_.push_back(reply);
  return reply;
}

json RecordingProvider::fixture() const {
  std::lock_guard lock(mu_);
  json out = json::array();
  for (const auto& r : replies_) out.push_back({{"reply", to_json(r)}});
  return out;
}

}  // namespace rai::llm
