#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace rai::msgbus {

inline constexpr int kWireVersion = 1;

enum class Kind {
  kPub,
  kSrvReq,
  kSrvRes,
  kActGoal,
  kActAccept,
  kActFeedback,
  kActResult,
};

std::string_view to_string(Kind kind);
std::optional<Kind> kind_from_string(std::string_view text);

// Replies (service responses and every action message after the goal) name
// the message they answer in `corr`; originating messages never do.
bool requires_corr(Kind kind);

struct Envelope {
  int version = kWireVersion;
  Kind kind = Kind::kPub;
  std::string id;
  std::string topic;
  std::optional<std::string> corr;
  std::int64_t ts = 0;
  nlohmann::json payload;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// Topic grammar: one or more '/'-separated segments of [a-z0-9_].
bool is_valid_topic(std::string_view topic);
// Throws InvalidTopic.
void validate_topic(std::string_view topic);

}  // namespace rai::msgbus
