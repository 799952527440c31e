#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rai/msgbus/envelope.hpp"

namespace rai::msgbus {

// One envelope per line: compact UTF-8 JSON with keys in the order
// v, kind, id, topic, corr, ts, payload, terminated by '\n'. `corr` is
// omitted when absent.
std::string encode_envelope(const Envelope& envelope);

// Accepts a single frame with or without its trailing newline.
// Throws MalformedFrame on bad syntax, unknown kind, missing or extra
// fields, a version other than 1, or a corr/kind mismatch.
Envelope decode_envelope(std::string_view frame);

// Splits a byte stream into newline-terminated frames.
class LineFramer {
 public:
  explicit LineFramer(std::size_t max_line = 1 << 20) : max_line_(max_line) {}

  void feed(std::string_view bytes);
  // Next complete line without its terminator. Throws MalformedFrame when a
  // line grows past max_line without a newline.
  std::optional<std::string> next_line();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::size_t max_line_;
  std::string buffer_;
};

}  // namespace rai::msgbus
