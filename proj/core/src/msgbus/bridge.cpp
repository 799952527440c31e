#include "rai/msgbus/bridge.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "rai/msgbus/codec.hpp"

namespace rai::msgbus {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

class Session {
 public:
  virtual ~Session() = default;
  virtual void start() = 0;
  virtual void send(std::string frame) = 0;
  virtual void close() = 0;
};

class SessionOwner {
 public:
  virtual ~SessionOwner() = default;
  virtual void add(const std::shared_ptr<Session>& s) = 0;
  virtual void remove(const std::shared_ptr<Session>& s) = 0;
  virtual std::string error_frame(const std::string& message) = 0;
  virtual void handle_inbound(Session& session, std::string_view frame) = 0;
};

}  // namespace

struct BridgeServer::Impl : SessionOwner, std::enable_shared_from_this<BridgeServer::Impl> {
  Impl(Bus& b, BridgeOptions o) : bus(b), options(std::move(o)) {}

  Bus& bus;
  BridgeOptions options;
  asio::io_context ioc;
  std::optional<tcp::acceptor> ws_acceptor;
  std::optional<tcp::acceptor> tcp_acceptor;
  std::thread worker;
  Registration tap;
  bool running = false;

  mutable std::mutex mu;
  std::set<std::shared_ptr<Session>> sessions;
  std::atomic<std::uint64_t> frames_in{0};
  std::atomic<std::uint64_t> frames_out{0};

  void add(const std::shared_ptr<Session>& s) override {
    std::lock_guard lock(mu);
    sessions.insert(s);
  }
  void remove(const std::shared_ptr<Session>& s) override {
    std::lock_guard lock(mu);
    sessions.erase(s);
  }

  std::string error_frame(const std::string& message) override {
    Envelope e;
    e.kind = Kind::kPub;
    e.id = bus.next_id();
    e.topic = options.error_topic;
    e.ts = bus.loop().now_ms();
    e.payload = json{{"error", message}};
    return encode_envelope(e);
  }

  bool is_inbound(const std::string& topic) const {
    for (const auto& t : options.inbound_topics) {
      if (t == topic) return true;
    }
    return false;
  }

  bool is_outbound(const std::string& topic) const {
    for (const auto& t : options.outbound_topics) {
      if (t == topic) return true;
    }
    return false;
  }

  // Runs on the network thread.
  void handle_inbound(Session& session, std::string_view frame) override {
    ++frames_in;
    Envelope e;
    try {
      e = decode_envelope(frame);
    } catch (const MalformedFrame& ex) {
      session.send(error_frame(ex.what()));
      return;
    }
    if (e.kind != Kind::kPub || !is_inbound(e.topic)) {
      session.send(error_frame("unsupported frame: " + std::string(to_string(e.kind)) + " on " +
                               e.topic));
      return;
    }
    Bus* target = &bus;
    bus.loop().post([target, topic = std::move(e.topic), payload = std::move(e.payload)]() mutable {
      target->publish(topic, std::move(payload));
    });
  }

  // Runs on whichever thread published.
  void forward(const Envelope& e) {
    if (e.kind != Kind::kPub || !is_outbound(e.topic)) return;
    std::string frame = encode_envelope(e);
    std::vector<std::shared_ptr<Session>> targets;
    {
      std::lock_guard lock(mu);
      targets.assign(sessions.begin(), sessions.end());
    }
    for (const auto& s : targets) {
      s->send(frame);
      ++frames_out;
    }
  }

  void accept_ws();
  void accept_tcp();
};

namespace {

class WsSession : public Session, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, std::weak_ptr<SessionOwner> owner)
      : ws_(std::move(socket)), owner_(std::move(owner)) {}

  void start() override {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      if (auto owner = self->owner_.lock()) owner->add(self);
      self->read();
    });
  }

  void send(std::string frame) override {
    asio::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
      self->outbox_.push_back(std::move(frame));
      if (self->outbox_.size() == 1) self->write();
    });
  }

  void close() override {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->drop();
        return;
      }
      std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (auto owner = self->owner_.lock()) owner->handle_inbound(*self, frame);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->drop();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  void drop() {
    if (auto owner = owner_.lock()) owner->remove(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::weak_ptr<SessionOwner> owner_;
};

class TcpSession : public Session, public std::enable_shared_from_this<TcpSession> {
 public:
  TcpSession(tcp::socket socket, std::weak_ptr<SessionOwner> owner)
      : socket_(std::move(socket)), owner_(std::move(owner)) {}

  void start() override {
    if (auto owner = owner_.lock()) owner->add(shared_from_this());
    read();
  }

  void send(std::string frame) override {
    asio::post(socket_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
      self->outbox_.push_back(std::move(frame));
      if (self->outbox_.size() == 1) self->write();
    });
  }

  void close() override {
    asio::post(socket_.get_executor(), [self = shared_from_this()] {
      boost::system::error_code ec;
      self->socket_.close(ec);
    });
  }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_),
                            [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
                              if (ec) {
                                self->drop();
                                return;
                              }
                              self->framer_.feed(std::string_view(self->chunk_.data(), n));
                              self->drain();
                              self->read();
                            });
  }

  void drain() {
    auto owner = owner_.lock();
    while (true) {
      std::optional<std::string> line;
      try {
        line = framer_.next_line();
      } catch (const MalformedFrame& ex) {
        if (owner) send(owner->error_frame(ex.what()));
        return;
      }
      if (!line) return;
      if (line->empty()) continue;
      if (owner) owner->handle_inbound(*this, *line);
    }
  }

  void write() {
    asio::async_write(socket_, asio::buffer(outbox_.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        if (ec) {
                          self->drop();
                          return;
                        }
                        self->outbox_.pop_front();
                        if (!self->outbox_.empty()) self->write();
                      });
  }

  void drop() {
    if (auto owner = owner_.lock()) owner->remove(shared_from_this());
  }

  tcp::socket socket_;
  std::array<char, 4096> chunk_{};
  LineFramer framer_;
  std::deque<std::string> outbox_;
  std::weak_ptr<SessionOwner> owner_;
};

}  // namespace

void BridgeServer::Impl::accept_ws() {
  ws_acceptor->async_accept([self = shared_from_this()](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<WsSession>(std::move(socket), self)->start();
    self->accept_ws();
  });
}

void BridgeServer::Impl::accept_tcp() {
  tcp_acceptor->async_accept([self = shared_from_this()](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<TcpSession>(std::move(socket), self)->start();
    self->accept_tcp();
  });
}

BridgeServer::BridgeServer(Bus& bus, BridgeOptions options)
    : impl_(std::make_shared<Impl>(bus, std::move(options))) {}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  if (impl_->running) return;
  try {
    const auto address = asio::ip::make_address(impl_->options.address);
    impl_->ws_acceptor.emplace(impl_->ioc, tcp::endpoint(address, impl_->options.ws_port));
    if (impl_->options.tcp_port) {
      impl_->tcp_acceptor.emplace(impl_->ioc, tcp::endpoint(address, *impl_->options.tcp_port));
    }
  } catch (const boost::system::system_error& ex) {
    impl_->ws_acceptor.reset();
    impl_->tcp_acceptor.reset();
    throw BusError(std::string("bridge cannot listen: ") + ex.what());
  }
  std::weak_ptr<Impl> weak = impl_;
  impl_->tap = impl_->bus.add_tap([weak](const Envelope& e) {
    if (auto impl = weak.lock()) impl->forward(e);
  });
  impl_->accept_ws();
  if (impl_->tcp_acceptor) impl_->accept_tcp();
  impl_->running = true;
  impl_->worker = std::thread([impl = impl_] { impl->ioc.run(); });
}

void BridgeServer::stop() {
  if (!impl_ || !impl_->running) return;
  impl_->tap.reset();
  asio::post(impl_->ioc, [impl = impl_] {
    boost::system::error_code ec;
    if (impl->ws_acceptor) impl->ws_acceptor->close(ec);
    if (impl->tcp_acceptor) impl->tcp_acceptor->close(ec);
    std::set<std::shared_ptr<Session>> sessions;
    {
      std::lock_guard lock(impl->mu);
      sessions.swap(impl->sessions);
    }
    for (const auto& s : sessions) s->close();
  });
  impl_->ioc.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->running = false;
}

std::uint16_t BridgeServer::ws_port() const {
  return impl_->ws_acceptor ? impl_->ws_acceptor->local_endpoint().port() : 0;
}

std::optional<std::uint16_t> BridgeServer::tcp_port() const {
  if (!impl_->tcp_acceptor) return std::nullopt;
  return impl_->tcp_acceptor->local_endpoint().port();
}

std::size_t BridgeServer::connections() const {
  std::lock_guard lock(impl_->mu);
  return impl_->sessions.size();
}

std::uint64_t BridgeServer::frames_in() const { return impl_->frames_in.load(); }
std::uint64_t BridgeServer::frames_out() const { return impl_->frames_out.load(); }

}  // namespace rai::msgbus
