#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "emg/gateway/outbox.hpp"
#include "emg/gateway/session.hpp"
#include "emg/net/socket.hpp"

namespace emg::gateway {

inline constexpr std::uint16_t kDefaultGatewayPort = 8860;

struct ServerOptions {
  net::Endpoint listen{"0.0.0.0", kDefaultGatewayPort};
  std::optional<std::string> source;   // descriptor, see ingest::SourceSpec
  double source_speed = 1.0;           // pacing of file and synthetic sources
  std::optional<std::filesystem::path> bundle;
  std::optional<net::Endpoint> sim;    // remote simulator; in-process when absent
  bool start_decoding = false;         // enter Decoding at startup when a bundle is given
  SessionOptions session;
  std::optional<std::filesystem::path> event_log;  // JSONL copy of every event
  std::size_t outbox_capacity = kDefaultOutboxCapacity;
};

/// WebSocket endpoint /ws (events out, commands in, one JSON object per
/// message or line) and GET /state, driven by a single-threaded event loop
/// that also runs the session tick.
class GatewayServer {
 public:
  explicit GatewayServer(ServerOptions options);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  std::uint16_t port() const;
  /// Blocks until stop().
  void run();
  /// Safe from any thread.
  void stop();

  struct Impl;  // opaque

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace emg::gateway
