#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace emg::net {

/// IPv4 host and port.
struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port", ":port" or "port".
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// Owns a file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd();

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();
  void close();

 private:
  int fd_ = -1;
};

struct Datagram {
  std::string payload;
  Endpoint from;
};

class UdpSocket {
 public:
  UdpSocket();
  /// Binds to `local`; port 0 picks an ephemeral port.
  explicit UdpSocket(const Endpoint& local);

  void send_to(std::string_view payload, const Endpoint& to);
  /// Waits up to `timeout`; nullopt on timeout.
  std::optional<Datagram> receive(std::chrono::milliseconds timeout);
  std::uint16_t local_port() const;

 private:
  Fd fd_;
};

class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(Fd fd) : fd_(std::move(fd)) {}
  static TcpStream connect(const Endpoint& remote, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  /// Writes everything; throws on error (EPIPE included).
  void write_all(std::span<const std::uint8_t> bytes);
  /// Reads exactly bytes.size(); false on orderly EOF before the first byte.
  /// Throws on EOF mid-read or error.
  bool read_exact(std::span<std::uint8_t> bytes);
  void shutdown();
  bool valid() const { return fd_.valid(); }

 private:
  Fd fd_;
};

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& local);
  /// nullopt on timeout.
  std::optional<TcpStream> accept(std::chrono::milliseconds timeout);
  std::uint16_t local_port() const;

 private:
  Fd fd_;
};

}  // namespace emg::net
