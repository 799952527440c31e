#include "rai/msgbus/ids.hpp"

#include <mutex>
#include <random>

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

namespace rai::msgbus {

struct IdGenerator::Impl {
  explicit Impl(std::uint64_t seed) : engine(seed), generator(engine) {}
  std::mutex mu;
  std::mt19937_64 engine;
  boost::uuids::basic_random_generator<std::mt19937_64> generator;
};

IdGenerator::IdGenerator(std::uint64_t seed) : impl_(std::make_unique<Impl>(seed)) {}
IdGenerator::~IdGenerator() = default;

std::uint64_t IdGenerator::entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string IdGenerator::next() {
  std::lock_guard lock(impl_->mu);
  return boost::uuids::to_string(impl_->generator());
}

bool is_uuid(std::string_view text) {
  if (text.size() != 36) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'))) {
      return false;
    }
  }
  return true;
}

}  // namespace rai::msgbus
