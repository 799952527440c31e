#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rai/llm/message.hpp"

namespace rai::llm {

// Transport or HTTP failure. status is the HTTP code, or 0 when no response
// arrived at all.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, int status, int attempts, bool retryable)
      : std::runtime_error(what), status_(status), attempts_(attempts), retryable_(retryable) {}
  int status() const { return status_; }
  int attempts() const { return attempts_; }
  bool retryable() const { return retryable_; }

 private:
  int status_;
  int attempts_;
  bool retryable_;
};

class MalformedReply : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScriptExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ModelReply complete(const std::vector<ChatMessage>& messages,
                              const std::vector<toolkit::ToolSpec>& tools,
                              const CompletionParams& params) = 0;
};

using EmbeddingVector = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Throws MalformedReply if the reply is neither final text nor a non-empty
// call list, or if it names a tool that was not offered.
void check_reply(const ModelReply& reply, const std::vector<toolkit::ToolSpec>& tools);

// Throws std::invalid_argument unless messages is non-empty and starts with a
// SYSTEM or USER message.
void check_request(const std::vector<ChatMessage>& messages);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace rai::llm
