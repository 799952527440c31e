#include "rai/msgbus/envelope.hpp"

#include <array>
#include <utility>

#include "rai/msgbus/errors.hpp"

namespace rai::msgbus {

namespace {

constexpr std::array<std::pair<Kind, std::string_view>, 7> kKindNames{{
    {Kind::kPub, "pub"},
    {Kind::kSrvReq, "srv_req"},
    {Kind::kSrvRes, "srv_res"},
    {Kind::kActGoal, "act_goal"},
    {Kind::kActAccept, "act_accept"},
    {Kind::kActFeedback, "act_feedback"},
    {Kind::kActResult, "act_result"},
}};

bool is_segment_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

std::string_view to_string(Kind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<Kind> kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool requires_corr(Kind kind) {
  switch (kind) {
    case Kind::kSrvRes:
    case Kind::kActAccept:
    case Kind::kActFeedback:
    case Kind::kActResult:
      return true;
    case Kind::kPub:
    case Kind::kSrvReq:
    case Kind::kActGoal:
      return false;
  }
  return false;
}

bool is_valid_topic(std::string_view topic) {
  if (topic.empty()) return false;
  std::size_t segment_len = 0;
  for (char c : topic) {
    if (c == '/') {
      if (segment_len == 0) return false;
      segment_len = 0;
    } else if (is_segment_char(c)) {
      ++segment_len;
    } else {
      return false;
    }
  }
  return segment_len > 0;
}

void validate_topic(std::string_view topic) {
  if (!is_valid_topic(topic)) {
    throw InvalidTopic("invalid topic '" + std::string(topic) + "'");
  }
}

}  // namespace rai::msgbus
