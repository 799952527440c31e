#include "rai/llm/message.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "rai/llm/provider.hpp"

namespace rai::llm {

using nlohmann::json;
using toolkit::ContentPart;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
    case Role::kTool: return "tool";
  }
  return "?";
}

Role role_from_string(std::string_view text) {
  if (text == "system") return Role::kSystem;
  if (text == "user") return Role::kUser;
  if (text == "assistant") return Role::kAssistant;
  if (text == "tool") return Role::kTool;
  throw std::invalid_argument("unknown role '" + std::string(text) + "'");
}

ChatMessage ChatMessage::system(std::string text) {
  return {Role::kSystem, {ContentPart::make_text(std::move(text))}, std::nullopt, {}};
}

ChatMessage ChatMessage::user(std::string text) {
  return {Role::kUser, {ContentPart::make_text(std::move(text))}, std::nullopt, {}};
}

ChatMessage ChatMessage::assistant(std::string text) {
  return {Role::kAssistant, {ContentPart::make_text(std::move(text))}, std::nullopt, {}};
}

ChatMessage ChatMessage::assistant_calls(std::vector<ToolCall> calls) {
  return {Role::kAssistant, {}, std::nullopt, std::move(calls)};
}

ChatMessage ChatMessage::tool(const toolkit::ToolOutcome& outcome) {
  return {Role::kTool, outcome.content, outcome.tool_call_id, {}};
}

std::string ChatMessage::text() const {
  std::string out;
  for (const auto& p : parts) {
    if (p.type != ContentPart::Type::kText) continue;
    if (!out.empty()) out += '\n';
    out += p.text;
  }
  return out;
}

std::size_t ChatMessage::image_count() const {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.type == ContentPart::Type::kImage ? 1 : 0;
  return n;
}

ModelReply ModelReply::text(std::string text) { return {std::move(text), {}}; }

ModelReply ModelReply::calls(std::vector<ToolCall> calls) { return {std::nullopt, std::move(calls)}; }

json to_json(const ContentPart& part) {
  if (part.type == ContentPart::Type::kImage) return {{"image_ref", part.image_ref}};
  return {{"text", part.text}};
}

json to_json(const ToolCall& call) {
  return {{"id", call.id}, {"name", call.name}, {"arguments", call.arguments}};
}

json to_json(const ChatMessage& message) {
  json j = {{"role", to_string(message.role)}};
  json parts = json::array();
  for (const auto& p : message.parts) parts.push_back(to_json(p));
  j["parts"] = std::move(parts);
  if (message.tool_call_id) j["tool_call_id"] = *message.tool_call_id;
  if (!message.tool_calls.empty()) {
    json calls = json::array();
    for (const auto& c : message.tool_calls) calls.push_back(to_json(c));
    j["tool_calls"] = std::move(calls);
  }
  return j;
}

json to_json(const ModelReply& reply) {
  if (reply.final_text) return {{"text", *reply.final_text}};
  json calls = json::array();
  for (const auto& c : reply.tool_calls) calls.push_back(to_json(c));
  return {{"tool_calls", std::move(calls)}};
}

namespace {

ToolCall call_from_json(const json& j) {
  ToolCall c;
  c.id = j.value("id", "");
  c.name = j.at("name").get<std::string>();
  c.arguments = j.value("arguments", json::object());
  return c;
}

}  // namespace

ChatMessage message_from_json(const json& j) {
  ChatMessage m;
  m.role = role_from_string(j.at("role").get<std::string>());
  for (const auto& p : j.value("parts", json::array())) {
    if (p.contains("image_ref")) {
      m.parts.push_back(ContentPart::make_image(p.at("image_ref").get<std::string>()));
    } else {
      m.parts.push_back(ContentPart::make_text(p.at("text").get<std::string>()));
    }
  }
  if (j.contains("tool_call_id")) m.tool_call_id = j.at("tool_call_id").get<std::string>();
  for (const auto& c : j.value("tool_calls", json::array())) m.tool_calls.push_back(call_from_json(c));
  return m;
}

ModelReply reply_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("reply must be an object");
  const bool has_text = j.contains("text");
  const bool has_calls = j.contains("tool_calls");
  if (has_text == has_calls) throw std::invalid_argument("reply needs exactly one of text, tool_calls");
  if (has_text) return ModelReply::text(j.at("text").get<std::string>());
  std::vector<ToolCall> calls;
  for (const auto& c : j.at("tool_calls")) calls.push_back(call_from_json(c));
  if (calls.empty()) throw std::invalid_argument("tool_calls must be non-empty");
  return ModelReply::calls(std::move(calls));
}

std::optional<std::string> check_conversation(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) return "empty conversation";
  if (messages.front().role != Role::kSystem && messages.front().role != Role::kUser) {
    return "first message must be system or user";
  }
  std::set<std::string> open_calls;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& m = messages[i];
    if (m.image_count() > 0 && m.role != Role::kUser && m.role != Role::kTool) {
      return "image part in a " + std::string(to_string(m.role)) + " message";
    }
    if (m.role == Role::kTool) {
      if (!m.tool_call_id) return "tool message without tool_call_id";
      if (open_calls.count(*m.tool_call_id) == 0) {
        return "tool message answers unknown call '" + *m.tool_call_id + "'";
      }
    } else if (m.tool_call_id) {
      return "tool_call_id on a non-tool message";
    }
    if (!m.tool_calls.empty()) {
      if (m.role != Role::kAssistant) return "tool calls on a non-assistant message";
      for (const auto& c : m.tool_calls) open_calls.insert(c.id);
    }
  }
  return std::nullopt;
}

void check_reply(const ModelReply& reply, const std::vector<toolkit::ToolSpec>& tools) {
  if (reply.final_text) {
    if (!reply.tool_calls.empty()) throw MalformedReply("reply has both text and tool calls");
    return;
  }
  if (reply.tool_calls.empty()) throw MalformedReply("reply has neither text nor tool calls");
  for (const auto& call : reply.tool_calls) {
    bool offered = false;
    for (const auto& t : tools) offered = offered || t.name == call.name;
    if (!offered) throw MalformedReply("reply calls tool '" + call.name + "' which was not offered");
    if (!call.arguments.is_object()) throw MalformedReply("arguments of '" + call.name + "' are not an object");
  }
}

void check_request(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw std::invalid_argument("no messages");
  if (messages.front().role != Role::kSystem && messages.front().role != Role::kUser) {
    throw std::invalid_argument("first message must be system or user");
  }
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace rai::llm
