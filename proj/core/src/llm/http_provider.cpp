#include "rai/llm/http_provider.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <httplib.h>

namespace rai::llm {

using nlohmann::json;
using toolkit::ContentPart;

std::string base64_encode(std::string_view bytes) {
  namespace it = boost::archive::iterators;
  using Encoder = it::base64_from_binary<it::transform_width<std::string_view::const_iterator, 6, 8>>;
  std::string out(Encoder(bytes.begin()), Encoder(bytes.end()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

HttpConfig HttpConfig::from_env() {
  HttpConfig config;
  const char* base = std::getenv("RAI_LLM_BASE_URL");
  if (base == nullptr || *base == '\0') throw std::invalid_argument("RAI_LLM_BASE_URL is not set");
  config.base_url = base;
  if (const char* key = std::getenv("RAI_LLM_API_KEY")) config.api_key = key;
  return config;
}

namespace {

struct Endpoint {
  std::string origin;
  std::string prefix;
};

Endpoint split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

std::string api_path(const std::string& prefix, const std::string& tail) {
  const bool has_version = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
  return prefix + (has_version ? "" : "/v1") + tail;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

json post_json(const HttpConfig& config, const std::string& tail, const json& body) {
  const Endpoint ep = split_url(config.base_url);
  const std::string path = api_path(ep.prefix, tail);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(config.timeout_s, 0);
  client.set_read_timeout(config.timeout_s, 0);
  client.set_write_timeout(config.timeout_s, 0);
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);
  const std::string payload = body.dump();

  const int attempts_allowed = 1 + std::max(0, config.max_retries);
  for (int attempt = 1;; ++attempt) {
    auto res = client.Post(path, headers, payload, "application/json");
    int status = 0;
    std::string reason;
    if (!res) {
      reason = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      try {
        return json::parse(res->body);
      } catch (const json::exception& ex) {
        throw MalformedReply(std::string("response is not JSON: ") + ex.what());
      }
    } else {
      status = res->status;
      reason = "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200);
    }
    // Transport failures are retried like 5xx; other 4xx are final.
    const bool retryable = status == 0 || retryable_status(status);
    if (!retryable || attempt >= attempts_allowed) {
      throw ProviderError(reason, status, attempt, retryable);
    }
    const long long delay = static_cast<long long>(config.backoff_base_ms) << (attempt - 1);
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  }
}

}  // namespace

HttpProvider::HttpProvider(HttpConfig config, ImageResolver images)
    : config_(std::move(config)), images_(std::move(images)) {}

json HttpProvider::request_body(const std::vector<ChatMessage>& messages,
                                const std::vector<toolkit::ToolSpec>& tools,
                                const CompletionParams& params) const {
  auto image_url = [this](const std::string& ref) {
    std::optional<ImageData> data = images_ ? images_(ref) : std::nullopt;
    if (!data) throw std::invalid_argument("no image data for asset '" + ref + "'");
    return json{{"type", "image_url"},
                {"image_url", {{"url", "data:" + data->mime + ";base64," + base64_encode(data->bytes)}}}};
  };

  json out_messages = json::array();
  for (const auto& m : messages) {
    json j = {{"role", to_string(m.role)}};
    switch (m.role) {
      case Role::kSystem:
        j["content"] = m.text();
        break;
      case Role::kUser:
        if (m.image_count() == 0) {
          j["content"] = m.text();
        } else {
          json parts = json::array();
          for (const auto& p : m.parts) {
            parts.push_back(p.type == ContentPart::Type::kText ? json{{"type", "text"}, {"text", p.text}}
                                                               : image_url(p.image_ref));
          }
          j["content"] = std::move(parts);
        }
        break;
      case Role::kAssistant:
        if (m.tool_calls.empty()) {
          j["content"] = m.text();
        } else {
          j["content"] = nullptr;
          json calls = json::array();
          for (const auto& c : m.tool_calls) {
            calls.push_back({{"id", c.id},
                             {"type", "function"},
                             {"function", {{"name", c.name}, {"arguments", c.arguments.dump()}}}});
          }
          j["tool_calls"] = std::move(calls);
        }
        break;
      case Role::kTool:
        j["tool_call_id"] = m.tool_call_id.value_or("");
        j["content"] = m.text();
        break;
    }
    out_messages.push_back(std::move(j));
    // Tool messages cannot carry images on this API; follow with a user turn.
    if (m.role == Role::kTool && m.image_count() > 0) {
      json parts = json::array();
      for (const auto& p : m.parts) {
        if (p.type == ContentPart::Type::kImage) parts.push_back(image_url(p.image_ref));
      }
      out_messages.push_back({{"role", "user"}, {"content", std::move(parts)}});
    }
  }

  json body = {{"model", params.model.empty() ? config_.model : params.model},
               {"messages", std::move(out_messages)},
               {"temperature", params.temperature},
               {"max_tokens", params.max_output}};
  if (!tools.empty()) {
    json tool_list = json::array();
    for (const auto& t : tools) tool_list.push_back({{"type", "function"}, {"function", toolkit::to_function_schema(t)}});
    body["tools"] = std::move(tool_list);
    body["tool_choice"] = "auto";
  }
  return body;
}

ModelReply HttpProvider::parse_response(const json& response, const std::vector<toolkit::ToolSpec>& tools) {
  ModelReply reply;
  try {
    const json& message = response.at("choices").at(0).at("message");
    const json calls = message.value("tool_calls", json::array());
    if (calls.is_array() && !calls.empty()) {
      for (const auto& c : calls) {
        const json& fn = c.at("function");
        toolkit::ToolCall call;
        call.id = c.value("id", "");
        call.name = fn.at("name").get<std::string>();
        const json& args = fn.contains("arguments") ? fn["arguments"] : json("{}");
        call.arguments = args.is_string() ? json::parse(args.get<std::string>().empty() ? "{}" : args.get<std::string>())
                                          : args;
        reply.tool_calls.push_back(std::move(call));
      }
    } else if (message.contains("content") && message["content"].is_string()) {
      reply.final_text = message["content"].get<std::string>();
    } else {
      throw MalformedReply("message has neither content nor tool calls");
    }
  } catch (const json::exception& ex) {
    throw MalformedReply(std::string("unparseable completion: ") + ex.what());
  }
  check_reply(reply, tools);
  return reply;
}

ModelReply HttpProvider::complete(const std::vector<ChatMessage>& messages,
                                  const std::vector<toolkit::ToolSpec>& tools,
                                  const CompletionParams& params) {
  check_request(messages);
  return parse_response(post_json(config_, "/chat/completions", request_body(messages, tools, params)), tools);
}

HttpEmbedder::HttpEmbedder(HttpConfig config, std::string model, std::size_t dim)
    : config_(std::move(config)), model_(std::move(model)), dim_(dim) {}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  const json response = post_json(config_, "/embeddings", {{"model", model_}, {"input", texts}});
  std::vector<EmbeddingVector> out(texts.size());
  try {
    for (const auto& item : response.at("data")) {
      const auto index = item.at("index").get<std::size_t>();
      if (index >= out.size()) throw MalformedReply("embedding index out of range");
      out[index] = item.at("embedding").get<EmbeddingVector>();
      if (out[index].size() != dim_) throw MalformedReply("embedding has unexpected dimension");
    }
  } catch (const json::exception& ex) {
    throw MalformedReply(std::string("unparseable embeddings: ") + ex.what());
  }
  for (const auto& v : out) {
    if (v.empty()) throw MalformedReply("missing embedding in response");
  }
  return out;
}

}  // namespace rai::llm
