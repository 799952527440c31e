#include "rai/scenario/transcript.hpp"

#include <fstream>
#include <sstream>

namespace rai::scenario {

using nlohmann::json;

json to_json(const TranscriptEvent& e) {
  return {{"tick", e.tick}, {"seq", e.seq}, {"source", e.source}, {"kind", e.kind}, {"payload", e.payload}};
}

TranscriptEvent event_from_json(const json& j) {
  try {
    TranscriptEvent e;
    e.tick = j.at("tick").get<std::int64_t>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.source = j.at("source").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.value("payload", json());
    return e;
  } catch (const json::exception& ex) {
    throw TranscriptError(std::string("bad transcript event: ") + ex.what());
  }
}

void Transcript::record(std::string source, std::string kind, json payload) {
  const std::int64_t tick = tick_ ? tick_() : 0;
  std::lock_guard lock(mu_);
  // Ticks never go backwards even if the source is read mid-update.
  const std::int64_t t = events_.empty() ? tick : std::max(tick, events_.back().tick);
  events_.push_back({t, events_.size(), std::move(source), std::move(kind), std::move(payload)});
}

std::vector<TranscriptEvent> Transcript::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

std::string Transcript::to_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& e : events_) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

void Transcript::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TranscriptError("cannot write transcript " + path.string());
  out << to_jsonl();
  if (!out) throw TranscriptError("failed writing transcript " + path.string());
}

std::vector<TranscriptEvent> parse_transcript(const std::string& jsonl) {
  std::vector<TranscriptEvent> events;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw TranscriptError("line " + std::to_string(n) + ": " + ex.what());
    }
    auto e = event_from_json(j);
    if (!events.empty()) {
      const auto& p = events.back();
      if (e.tick < p.tick || (e.tick == p.tick && e.seq <= p.seq) || e.seq <= p.seq) {
        throw TranscriptError("line " + std::to_string(n) + ": event out of order");
      }
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<TranscriptEvent> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TranscriptError("cannot read transcript " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_transcript(buf.str());
}

}  // namespace rai::scenario
