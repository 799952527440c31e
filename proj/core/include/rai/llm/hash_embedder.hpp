#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rai/llm/provider.hpp"

namespace rai::llm {

inline constexpr std::size_t kDefaultEmbeddingDim = 64;

// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

// Maximal runs of ASCII letters and digits, lowercased.
std::vector<std::string> tokenize(std::string_view text);

// Bag of hashed tokens, normalized to unit length; e_0 when there are no
// tokens.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim = kDefaultEmbeddingDim);

class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = kDefaultEmbeddingDim);
  std::size_t dimension() const override { return dim_; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dim_;
};

}  // namespace rai::llm
