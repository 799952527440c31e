#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rai/llm/http_provider.hpp"
#include "rai/llm/message.hpp"
#include "rai/whoami/store.hpp"

namespace rai::whoami {

class UnknownAsset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class WrongKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Asset {
  enum class Kind { kImage, kBodyDescription };
  Kind kind = Kind::kImage;
  std::filesystem::path path;
  // File contents for body descriptions; empty for images.
  std::string text;
};

struct IdentityBundle {
  std::string identity_text;
  std::string rules_text;
  std::shared_ptr<const ChunkStore> store;
  // Ordered by id, so prompts list body descriptions deterministically.
  std::map<std::string, Asset> assets;

  // Directory layout: identity.txt, rules.txt (optional), docs/*.txt|*.md,
  // assets/manifest.json mapping id -> {"kind": "image"|"body_description",
  // "file": path relative to assets/}. Throws BundleError.
  static IdentityBundle load(const std::filesystem::path& dir, std::shared_ptr<llm::Embedder> embedder,
                             const ChunkingOptions& chunking = {});
};

struct PromptOptions {
  bool include_rules = true;
};

inline constexpr const char* kQueryIdentityHint =
    "To answer questions about your own body, sensors or capabilities, call the query_identity tool.";

// Identity paragraph, rules (if enabled), body descriptions in asset id
// order, then kQueryIdentityHint, separated by blank lines.
std::string build_system_prompt(const IdentityBundle& bundle, const PromptOptions& options = {});

struct EmbodimentCondition {
  // Image asset shown in the first user turn; empty means language-only.
  std::optional<std::string> self_image;

  bool visual() const { return self_image.has_value(); }
};

inline EmbodimentCondition language_only() { return {}; }

// Throws UnknownAsset or WrongKind.
EmbodimentCondition attach_self_image(const IdentityBundle& bundle, const std::string& asset_id);

// [SYSTEM prompt, USER text (+ self image under the visual condition)].
std::vector<llm::ChatMessage> open_conversation(const std::string& system_prompt,
                                                const EmbodimentCondition& condition,
                                                const std::string& user_text);

// Reads an image asset for providers that send image bytes.
std::optional<llm::ImageData> load_image(const IdentityBundle& bundle, const std::string& asset_id);

}  // namespace rai::whoami
