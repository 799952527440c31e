#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/llm/provider.hpp"

namespace rai::llm {

struct HttpConfig {
  // Scheme, host and optional port, e.g. "https://api.openai.com".
  std::string base_url;
  std::string api_key;
  std::string model = "gpt-4o";
  int timeout_s = 60;
  int max_retries = 2;
  // Delay before retry n is backoff_base_ms * 2^(n-1).
  int backoff_base_ms = 500;

  // base_url from RAI_LLM_BASE_URL, api_key from RAI_LLM_API_KEY. Throws
  // std::invalid_argument if the base URL is unset.
  static HttpConfig from_env();
};

struct ImageData {
  std::string mime;
  std::string bytes;
};

// Maps an image asset id to its bytes; nullopt if unknown.
using ImageResolver = std::function<std::optional<ImageData>(const std::string& asset_id)>;

// OpenAI-compatible chat completions over HTTP(S).
class HttpProvider : public ChatProvider {
 public:
  explicit HttpProvider(HttpConfig config, ImageResolver images = {});

  ModelReply complete(const std::vector<ChatMessage>& messages,
                      const std::vector<toolkit::ToolSpec>& tools,
                      const CompletionParams& params) override;

  nlohmann::json request_body(const std::vector<ChatMessage>& messages,
                              const std::vector<toolkit::ToolSpec>& tools,
                              const CompletionParams& params) const;
  // Parses a chat.completions response. Throws MalformedReply.
  static ModelReply parse_response(const nlohmann::json& response,
                                   const std::vector<toolkit::ToolSpec>& tools);

 private:
  HttpConfig config_;
  ImageResolver images_;
};

// OpenAI-compatible /v1/embeddings client.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(HttpConfig config, std::string model, std::size_t dim);
  std::size_t dimension() const override { return dim_; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  HttpConfig config_;
  std::string model_;
  std::size_t dim_;
};

std::string base64_encode(std::string_view bytes);

}  // namespace rai::llm
