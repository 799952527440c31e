#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace rai::msgbus {

// Produces RFC 4122 version-4 UUID strings from a seeded engine, so a fixed
// seed yields the same id sequence on every run.
class IdGenerator {
 public:
  explicit IdGenerator(std::uint64_t seed);
  ~IdGenerator();
  IdGenerator(const IdGenerator&) = delete;
  IdGenerator& operator=(const IdGenerator&) = delete;

  static std::uint64_t entropy_seed();

  std::string next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool is_uuid(std::string_view text);

}  // namespace rai::msgbus
