#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>

#include "rai/msgbus/bridge.hpp"
#include "rai/msgbus/codec.hpp"
#include "rai/msgbus/ids.hpp"

namespace rai::msgbus {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct RemoteConnector::Impl {
  asio::io_context ioc;
  tcp::socket socket{ioc};
  IdGenerator ids;
  std::thread reader;
  std::mutex write_mu;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<Envelope> inbox;
  bool closed = false;

  explicit Impl(std::uint64_t seed) : ids(seed) {}

  void read_loop() {
    LineFramer framer;
    std::array<char, 4096> chunk{};
    while (true) {
      boost::system::error_code ec;
      std::size_t n = socket.read_some(asio::buffer(chunk), ec);
      if (ec) break;
      framer.feed(std::string_view(chunk.data(), n));
      try {
        while (auto line = framer.next_line()) {
          if (line->empty()) continue;
          Envelope e;
          try {
            e = decode_envelope(*line);
          } catch (const MalformedFrame&) {
            continue;
          }
          std::lock_guard lock(mu);
          inbox.push_back(std::move(e));
          cv.notify_all();
        }
      } catch (const MalformedFrame&) {
        break;
      }
    }
    std::lock_guard lock(mu);
    closed = true;
    cv.notify_all();
  }

  void write(const std::string& bytes) {
    std::lock_guard lock(write_mu);
    boost::system::error_code ec;
    asio::write(socket, asio::buffer(bytes), ec);
    if (ec) throw BusError("remote write failed: " + ec.message());
  }
};

RemoteConnector::RemoteConnector(const std::string& host, std::uint16_t port, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(seed)) {
  try {
    tcp::resolver resolver(impl_->ioc);
    asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
  } catch (const boost::system::system_error& ex) {
    throw BusError("cannot connect to " + host + ":" + std::to_string(port) + ": " + ex.what());
  }
  impl_->reader = std::thread([impl = impl_.get()] { impl->read_loop(); });
}

RemoteConnector::~RemoteConnector() {
  boost::system::error_code ec;
  impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
  impl_->socket.close(ec);
  if (impl_->reader.joinable()) impl_->reader.join();
}

void RemoteConnector::send(const Envelope& envelope) { impl_->write(encode_envelope(envelope)); }

std::string RemoteConnector::publish(const std::string& topic, nlohmann::json payload) {
  Envelope e;
  e.kind = Kind::kPub;
  e.id = impl_->ids.next();
  e.topic = topic;
  e.ts = 0;
  e.payload = std::move(payload);
  send(e);
  return e.id;
}

void RemoteConnector::send_raw(const std::string& bytes) { impl_->write(bytes); }

std::optional<Envelope> RemoteConnector::receive(Millis timeout_ms) {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                     [&] { return !impl_->inbox.empty() || impl_->closed; });
  if (impl_->inbox.empty()) return std::nullopt;
  Envelope e = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  return e;
}

}  // namespace rai::msgbus
