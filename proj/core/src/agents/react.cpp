#include "rai/agents/react.hpp"

#include "rai/llm/message.hpp"

namespace rai::agents {

using nlohmann::json;

std::string_view to_string(ReactStatus status) {
  switch (status) {
    case ReactStatus::kCompleted: return "COMPLETED";
    case ReactStatus::kFailed: return "FAILED";
    case ReactStatus::kStopped: return "STOPPED";
  }
  return "?";
}

ReactResult react_loop(const ReactConfig& config, std::vector<llm::ChatMessage> conversation,
                       toolkit::ToolContext& context, const std::function<bool()>& stop_requested,
                       const std::function<void(const std::string&, const json&)>& trace) {
  if (config.provider == nullptr || config.tools == nullptr) throw std::invalid_argument("react loop needs a provider and tools");
  if (config.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  auto emit = [&trace](const std::string& kind, const json& payload) {
    if (trace) trace(kind, payload);
  };

  const std::size_t first = !conversation.empty() && conversation.front().role == llm::Role::kSystem ? 1 : 0;
  const auto specs = config.tools->specs();
  ReactResult result;
  auto finish = [&](ReactStatus status, std::string text) {
    result.status = status;
    result.final_text = std::move(text);
    result.transcript.assign(conversation.begin() + static_cast<std::ptrdiff_t>(first), conversation.end());
    return result;
  };

  std::size_t image_parts = 0;
  for (const auto& m : conversation) image_parts += m.image_count();
  emit("session_open", {{"messages", conversation.size()}, {"image_parts", image_parts},
                        {"user_text", conversation.empty() ? "" : conversation.back().text()}});

  while (result.model_calls < config.max_steps) {
    if (stop_requested && stop_requested()) return finish(ReactStatus::kStopped, "stopped");
    llm::ModelReply reply;
    ++result.model_calls;
    try {
      reply = config.provider->complete(conversation, specs, config.params);
    } catch (const llm::ScriptExhausted& ex) {
      result.error = ex.what();
      result.script_exhausted = true;
      emit("model_error", {{"step", result.model_calls}, {"error", result.error}, {"type", "ScriptExhausted"}});
      return finish(ReactStatus::kFailed, result.error);
    } catch (const llm::ProviderError& ex) {
      result.error = ex.what();
      emit("model_error", {{"step", result.model_calls}, {"error", result.error}, {"type", "ProviderError"},
                           {"status", ex.status()}});
      return finish(ReactStatus::kFailed, result.error);
    } catch (const llm::MalformedReply& ex) {
      result.error = ex.what();
      emit("model_error", {{"step", result.model_calls}, {"error", result.error}, {"type", "MalformedReply"}});
      return finish(ReactStatus::kFailed, result.error);
    }
    emit("model_reply", {{"step", result.model_calls}, {"reply", llm::to_json(reply)}});

    if (reply.is_final()) {
      conversation.push_back(llm::ChatMessage::assistant(*reply.final_text));
      return finish(ReactStatus::kCompleted, *reply.final_text);
    }
    conversation.push_back(llm::ChatMessage::assistant_calls(reply.tool_calls));
    for (const auto& call : reply.tool_calls) {
      auto outcome = toolkit::execute(call, *config.tools, context);
      ++result.tool_calls;
      emit("tool_result", {{"call_id", call.id},
                           {"name", call.name},
                           {"arguments", call.arguments},
                           {"status", toolkit::to_string(outcome.status)},
                           {"text", outcome.text()}});
      conversation.push_back(llm::ChatMessage::tool(outcome));
    }
  }
  result.error = kStepLimitText;
  emit("step_limit", {{"model_calls", result.model_calls}});
  return finish(ReactStatus::kFailed, kStepLimitText);
}

}  // namespace rai::agents
