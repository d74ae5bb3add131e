#include "emg/net/socket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "emg/error.hpp"

namespace emg::net {

namespace {

[[noreturn]] void sys_fail(const std::string& what) { throw Error(what + ": " + std::strerror(errno)); }

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(ep.port);
  const std::string host = ep.host.empty() ? "0.0.0.0" : ep.host;
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error("cannot resolve host '" + host + "'");
  }
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

Endpoint from_sockaddr(const sockaddr_in& sa) {
  char buf[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof buf);
  return {buf, ntohs(sa.sin_port)};
}

std::uint16_t bound_port(int fd) {
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  if (getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len) != 0) sys_fail("getsockname");
  return ntohs(sa.sin_port);
}

bool wait_for(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r < 0) sys_fail("poll");
    return r > 0;
  }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  Endpoint ep;
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) ep.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  unsigned value = 0;
  const auto res = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (res.ec != std::errc() || res.ptr != port_text.data() + port_text.size() || value > 65535) {
    throw ParameterError("bad endpoint '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

Fd& Fd::operator=(Fd&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.release();
  }
  return *this;
}

Fd::~Fd() { close(); }

int Fd::release() {
  const int f = fd_;
  fd_ = -1;
  return f;
}

void Fd::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

UdpSocket::UdpSocket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {
  if (!fd_.valid()) sys_fail("socket");
}

UdpSocket::UdpSocket(const Endpoint& local) : UdpSocket() {
  const int one = 1;
  ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const sockaddr_in sa = to_sockaddr(local);
  if (::bind(fd_.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    sys_fail("bind " + local.to_string());
  }
}

void UdpSocket::send_to(std::string_view payload, const Endpoint& to) {
  const sockaddr_in sa = to_sockaddr(to);
  const auto n = ::sendto(fd_.get(), payload.data(), payload.size(), 0, reinterpret_cast<const sockaddr*>(&sa), sizeof sa);
  if (n < 0) sys_fail("sendto " + to.to_string());
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout) {
  if (!wait_for(fd_.get(), POLLIN, timeout)) return std::nullopt;
  char buf[65536];
  sockaddr_in from{};
  socklen_t len = sizeof from;
  const auto n = ::recvfrom(fd_.get(), buf, sizeof buf, 0, reinterpret_cast<sockaddr*>(&from), &len);
  if (n < 0) sys_fail("recvfrom");
  return Datagram{std::string(buf, static_cast<std::size_t>(n)), from_sockaddr(from)};
}

std::uint16_t UdpSocket::local_port() const { return bound_port(fd_.get()); }

TcpStream TcpStream::connect(const Endpoint& remote, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  const sockaddr_in sa = to_sockaddr(remote);
  for (;;) {
    Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd.valid()) sys_fail("socket");
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) == 0) {
      const int one = 1;
      ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return TcpStream(std::move(fd));
    }
    // The server may still be starting up.
    if (errno != ECONNREFUSED || std::chrono::steady_clock::now() >= deadline) {
      sys_fail("connect " + remote.to_string());
    }
    ::usleep(20000);
  }
}

void TcpStream::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::send(fd_.get(), bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    done += static_cast<std::size_t>(n);
  }
}

bool TcpStream::read_exact(std::span<std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::recv(fd_.get(), bytes.data() + done, bytes.size() - done, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    if (n == 0) {
      if (done == 0) return false;
      throw DecodeError("connection closed mid-frame");
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void TcpStream::shutdown() {
  if (fd_.valid()) ::shutdown(fd_.get(), SHUT_RDWR);
}

TcpListener::TcpListener(const Endpoint& local) : fd_(::socket(AF_INET, SOCK_STREAM, 0)) {
  if (!fd_.valid()) sys_fail("socket");
  const int one = 1;
  ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const sockaddr_in sa = to_sockaddr(local);
  if (::bind(fd_.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) sys_fail("bind " + local.to_string());
  if (::listen(fd_.get(), 4) != 0) sys_fail("listen");
}

std::optional<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) {
  if (!wait_for(fd_.get(), POLLIN, timeout)) return std::nullopt;
  Fd fd(::accept(fd_.get(), nullptr, nullptr));
  if (!fd.valid()) sys_fail("accept");
  const int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return TcpStream(std::move(fd));
}

std::uint16_t TcpListener::local_port() const { return bound_port(fd_.get()); }

}  // namespace emg::net
