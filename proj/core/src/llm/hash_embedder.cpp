#include "rai/llm/hash_embedder.hpp"

#include <cmath>
#include <stdexcept>

namespace rai::llm {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const bool alnum = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9');
    if (alnum) {
      cur += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  EmbeddingVector v(dim, 0.0);
  const auto tokens = tokenize(text);
  if (tokens.empty()) {
    v[0] = 1.0;
    return v;
  }
  for (const auto& t : tokens) v[fnv1a64(t) % dim] += 1.0;
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<EmbeddingVector> HashEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hash_embed(t, dim_));
  return out;
}

}  // namespace rai::llm
