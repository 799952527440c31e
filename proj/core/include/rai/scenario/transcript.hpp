#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rai::scenario {

class TranscriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranscriptEvent {
  std::int64_t tick = 0;
  std::uint64_t seq = 0;
  // "runner", "bus", "world" or an agent id.
  std::string source;
  std::string kind;
  nlohmann::json payload;

  friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

nlohmann::json to_json(const TranscriptEvent& event);
// Throws TranscriptError.
TranscriptEvent event_from_json(const nlohmann::json& j);

// Append-only event log ordered by (tick, seq). Thread-safe.
class Transcript {
 public:
  using TickSource = std::function<std::int64_t()>;

  explicit Transcript(TickSource tick = {}) : tick_(std::move(tick)) {}

  void record(std::string source, std::string kind, nlohmann::json payload);
  std::vector<TranscriptEvent> events() const;
  std::size_t size() const;

  // One compact JSON object per line, '\n' terminated.
  std::string to_jsonl() const;
  void write(const std::filesystem::path& path) const;

 private:
  TickSource tick_;
  mutable std::mutex mu_;
  std::vector<TranscriptEvent> events_;
};

// Throws TranscriptError on unreadable files, bad lines, or events out of
// (tick, seq) order.
std::vector<TranscriptEvent> read_transcript(const std::filesystem::path& path);
std::vector<TranscriptEvent> parse_transcript(const std::string& jsonl);

}  // namespace rai::scenario
