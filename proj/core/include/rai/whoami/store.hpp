#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rai/llm/provider.hpp"

namespace rai::whoami {

class EmptyDocument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyStore : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceDocument {
  std::string id;
  std::string title;
  std::string body;
};

struct ChunkingOptions {
  std::size_t size = 512;
  std::size_t overlap = 64;
};

// Offsets and lengths count Unicode code points, not bytes.
struct Chunk {
  std::string doc_id;
  std::size_t seq = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
  llm::EmbeddingVector vector;
};

struct ScoredChunk {
  Chunk chunk;
  double score = 0.0;
};

// Throws std::invalid_argument unless size >= 32 and overlap < size.
void validate(const ChunkingOptions& options);

// ceil(max(length - overlap, 1) / (size - overlap)).
std::size_t chunk_count(std::size_t length, const ChunkingOptions& options);

// [start, end) of each chunk: chunk k starts at k * (size - overlap), the
// last one ends at length.
std::vector<std::pair<std::size_t, std::size_t>> chunk_spans(std::size_t length,
                                                            const ChunkingOptions& options);

// Exact in-memory cosine store. Built once, then read-only.
class ChunkStore {
 public:
  explicit ChunkStore(std::shared_ptr<llm::Embedder> embedder);

  // Throws EmptyDocument for a document with an empty body.
  void ingest(const std::vector<SourceDocument>& docs, const ChunkingOptions& options = {});

  // Top k by cosine similarity, ties broken by (doc_id, seq). Throws
  // EmptyStore and std::invalid_argument for k == 0.
  std::vector<ScoredChunk> query(const std::string& question, std::size_t k) const;

  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  const llm::Embedder& embedder() const { return *embedder_; }

 private:
  std::shared_ptr<llm::Embedder> embedder_;
  std::vector<Chunk> chunks_;
};

}  // namespace rai::whoami
