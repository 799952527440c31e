#include "rai/whoami/store.hpp"

#include <algorithm>

namespace rai::whoami {

void validate(const ChunkingOptions& options) {
  if (options.size < 32) throw std::invalid_argument("chunk size must be at least 32");
  if (options.overlap >= options.size) throw std::invalid_argument("chunk overlap must be below chunk size");
}

std::size_t chunk_count(std::size_t length, const ChunkingOptions& options) {
  validate(options);
  const std::size_t stride = options.size - options.overlap;
  const std::size_t covered = length > options.overlap ? length - options.overlap : 1;
  return (covered + stride - 1) / stride;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_spans(std::size_t length,
                                                            const ChunkingOptions& options) {
  const std::size_t n = chunk_count(length, options);
  const std::size_t stride = options.size - options.overlap;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  spans.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t start = k * stride;
    spans.emplace_back(start, k + 1 == n ? length : std::min(length, start + options.size));
  }
  return spans;
}

namespace {

// Byte offset of every code point, plus the total length at the end.
std::vector<std::size_t> code_point_offsets(const std::string& text) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace

ChunkStore::ChunkStore(std::shared_ptr<llm::Embedder> embedder) : embedder_(std::move(embedder)) {
  if (!embedder_) throw std::invalid_argument("chunk store needs an embedder");
}

void ChunkStore::ingest(const std::vector<SourceDocument>& docs, const ChunkingOptions& options) {
  validate(options);
  for (const auto& doc : docs) {
    if (doc.body.empty()) throw EmptyDocument("document '" + doc.id + "' is empty");
  }
  std::vector<Chunk> added;
  std::vector<std::string> texts;
  for (const auto& doc : docs) {
    const auto offsets = code_point_offsets(doc.body);
    const std::size_t length = offsets.size() - 1;
    std::size_t seq = 0;
    for (const auto& [start, end] : chunk_spans(length, options)) {
      Chunk c;
      c.doc_id = doc.id;
      c.seq = seq++;
      c.start = start;
      c.end = end;
      c.text = doc.body.substr(offsets[start], offsets[end] - offsets[start]);
      texts.push_back(c.text);
      added.push_back(std::move(c));
    }
  }
  auto vectors = embedder_->embed(texts);
  if (vectors.size() != added.size()) throw std::runtime_error("embedder returned wrong number of vectors");
  for (std::size_t i = 0; i < added.size(); ++i) {
    added[i].vector = std::move(vectors[i]);
    chunks_.push_back(std::move(added[i]));
  }
}

std::vector<ScoredChunk> ChunkStore::query(const std::string& question, std::size_t k) const {
  if (chunks_.empty()) throw EmptyStore("chunk store is empty");
  if (k == 0) throw std::invalid_argument("k must be positive");
  const auto q = embedder_->embed({question}).at(0);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(chunks_.size());
  for (std::size_t i = 0; i < chunks_.size(); ++i) scored.emplace_back(llm::cosine(q, chunks_[i].vector), i);
  auto before = [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    const Chunk& ca = chunks_[a.second];
    const Chunk& cb = chunks_[b.second];
    if (ca.doc_id != cb.doc_id) return ca.doc_id < cb.doc_id;
    return ca.seq < cb.seq;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), before);
  std::vector<ScoredChunk> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({chunks_[scored[i].second], scored[i].first});
  return out;
}

}  // namespace rai::whoami
