#include "rai/msgbus/codec.hpp"

#include <array>
#include <stdexcept>

#include "rai/msgbus/errors.hpp"
#include "rai/msgbus/ids.hpp"

namespace rai::msgbus {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 7> kFields{"v", "kind", "id", "topic", "corr", "ts", "payload"};

[[noreturn]] void malformed(const std::string& why) { throw MalformedFrame("malformed frame: " + why); }

}  // namespace

std::string encode_envelope(const Envelope& e) {
  if (e.version != kWireVersion) throw std::invalid_argument("envelope version must be 1");
  if (!is_valid_topic(e.topic)) throw std::invalid_argument("envelope topic is invalid");
  if (e.id.empty()) throw std::invalid_argument("envelope id is empty");
  if (requires_corr(e.kind) != e.corr.has_value()) {
    throw std::invalid_argument("envelope corr does not match its kind");
  }
  ordered_json out;
  out["v"] = e.version;
  out["kind"] = std::string(to_string(e.kind));
  out["id"] = e.id;
  out["topic"] = e.topic;
  if (e.corr) out["corr"] = *e.corr;
  out["ts"] = e.ts;
  out["payload"] = e.payload;
  std::string line = out.dump();
  line.push_back('\n');
  return line;
}

Envelope decode_envelope(std::string_view frame) {
  if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
  if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
  if (frame.find('\n') != std::string_view::npos) malformed("embedded newline");

  json doc = json::parse(frame.begin(), frame.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) malformed("invalid JSON");
  if (!doc.is_object()) malformed("frame is not an object");

  for (const auto& item : doc.items()) {
    bool known = false;
    for (auto f : kFields) known = known || item.key() == f;
    if (!known) malformed("unknown field '" + item.key() + "'");
  }
  for (auto required : {"v", "kind", "id", "topic", "ts", "payload"}) {
    if (!doc.contains(required)) malformed(std::string("missing field '") + required + "'");
  }

  Envelope e;
  const json& v = doc["v"];
  if (!v.is_number_integer() || v.get<std::int64_t>() != kWireVersion) malformed("unsupported version");
  e.version = kWireVersion;

  const json& kind = doc["kind"];
  if (!kind.is_string()) malformed("kind is not a string");
  auto parsed_kind = kind_from_string(kind.get_ref<const std::string&>());
  if (!parsed_kind) malformed("unknown kind '" + kind.get<std::string>() + "'");
  e.kind = *parsed_kind;

  const json& id = doc["id"];
  if (!id.is_string() || !is_uuid(id.get_ref<const std::string&>())) malformed("id is not a UUID");
  e.id = id.get<std::string>();

  const json& topic = doc["topic"];
  if (!topic.is_string() || !is_valid_topic(topic.get_ref<const std::string&>())) {
    malformed("invalid topic");
  }
  e.topic = topic.get<std::string>();

  if (doc.contains("corr")) {
    const json& corr = doc["corr"];
    if (!corr.is_string() || !is_uuid(corr.get_ref<const std::string&>())) {
      malformed("corr is not a UUID");
    }
    e.corr = corr.get<std::string>();
  }
  if (requires_corr(e.kind) && !e.corr) malformed("kind requires corr");
  if (!requires_corr(e.kind) && e.corr) malformed("kind forbids corr");

  const json& ts = doc["ts"];
  if (!ts.is_number_integer()) malformed("ts is not an integer");
  e.ts = ts.get<std::int64_t>();

  e.payload = std::move(doc["payload"]);
  return e;
}

void LineFramer::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<std::string> LineFramer::next_line() {
  const auto pos = buffer_.find('\n');
  if (pos == std::string::npos) {
    if (buffer_.size() > max_line_) {
      buffer_.clear();
      throw MalformedFrame("malformed frame: line exceeds limit");
    }
    return std::nullopt;
  }
  std::string line = buffer_.substr(0, pos);
  buffer_.erase(0, pos + 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace rai::msgbus
