#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rai/msgbus/bus.hpp"

namespace rai::msgbus {

struct BridgeOptions {
  std::string address = "127.0.0.1";
  // 0 picks an ephemeral port; read it back with ws_port().
  std::uint16_t ws_port = 0;
  // Raw newline-delimited TCP listener, off unless set.
  std::optional<std::uint16_t> tcp_port;
  // PUB frames on these topics are published onto the bus.
  std::vector<std::string> inbound_topics{"hri/in"};
  // PUB envelopes on these topics are forwarded to every client.
  std::vector<std::string> outbound_topics{"hri/out", "mission/status", "world/snapshot"};
  // Rejected or malformed inbound frames are answered with a PUB on this
  // topic carrying {"error": text}; the connection stays open.
  std::string error_topic = "bridge/error";
};

// Relays wire-protocol frames between remote clients (WebSocket text frames
// or raw TCP lines, identical bytes either way) and an in-process Bus.
// Inbound publishes are posted onto the bus's event loop, so the loop's
// driver thread is the only one touching bus subscribers.
class BridgeServer {
 public:
  BridgeServer(Bus& bus, BridgeOptions options);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  // Binds and starts the network thread. Throws BusError if a port is in use.
  void start();
  void stop();

  std::uint16_t ws_port() const;
  std::optional<std::uint16_t> tcp_port() const;
  std::size_t connections() const;
  std::uint64_t frames_in() const;
  std::uint64_t frames_out() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Client side of the raw TCP framing; a minimal remote connector.
class RemoteConnector {
 public:
  RemoteConnector(const std::string& host, std::uint16_t port, std::uint64_t seed);
  ~RemoteConnector();
  RemoteConnector(const RemoteConnector&) = delete;
  RemoteConnector& operator=(const RemoteConnector&) = delete;

  void send(const Envelope& envelope);
  // Sends a PUB envelope; returns its id.
  std::string publish(const std::string& topic, nlohmann::json payload);
  // Sends raw bytes unchanged (used to exercise error handling).
  void send_raw(const std::string& bytes);
  // Waits up to timeout_ms (wall clock) for the next decoded frame.
  std::optional<Envelope> receive(Millis timeout_ms);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rai::msgbus
