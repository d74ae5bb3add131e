#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "emg/ingest/block_source.hpp"
#include "emg/net/socket.hpp"
#include "emg/sample_block.hpp"

namespace emg::ingest {

/// Frame layout, little-endian: u32 payload length | u8 type | payload.
///   HELLO: f64 rate | u16 channels | u64 first sample | u8 has_impedances
///          | f64 impedance per channel (if present)
///   DATA:  u64 first sample | u32 count | f32 samples, channel-major
///   END:   empty
enum class FrameType : std::uint8_t { Hello = 1, Data = 2, End = 3 };

inline constexpr std::uint32_t kMaxFramePayload = 64u << 20;
inline constexpr std::uint16_t kDefaultStreamPort = 8850;

struct StreamHello {
  double sample_rate_hz = 4000.0;
  std::uint16_t channels = 0;
  std::uint64_t first_sample = 0;
  std::optional<std::vector<double>> impedances_ohm;
  friend bool operator==(const StreamHello&, const StreamHello&) = default;
};

struct Frame {
  FrameType type = FrameType::End;
  std::string payload;
};

std::string encode_frame(FrameType type, const std::string& payload);
std::string encode_hello(const StreamHello& hello);
/// Samples [begin, end) of `block`.
std::string encode_data(const SampleBlock& block, std::size_t begin, std::size_t end);
std::string encode_data(const SampleBlock& block);
std::string encode_end();

StreamHello decode_hello(const std::string& payload);
SampleBlock decode_data(const std::string& payload, std::size_t channels);

/// nullopt on a clean EOF between frames.
std::optional<Frame> read_frame(net::TcpStream& stream);

struct ReplayOptions {
  double speed = 1.0;            // wall-clock multiplier; 0 sends as fast as possible
  std::size_t block_samples = 100;
  /// Sample ranges [first, last) that are never sent, to emulate lost data.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> drop;
};

/// Serves a BlockSource over the frame protocol, one client at a time.
class ReplayServer {
 public:
  using SourceFactory = std::function<std::unique_ptr<BlockSource>()>;

  ReplayServer(SourceFactory factory, const net::Endpoint& listen, ReplayOptions options = {});
  ~ReplayServer();

  std::uint16_t port() const { return listener_.local_port(); }

  /// Waits for one client and streams a fresh source to it. Returns false
  /// if no client arrived before `accept_timeout` or stop() was called.
  bool serve_one(std::chrono::milliseconds accept_timeout = std::chrono::seconds(30));
  /// Serves clients on a background thread until stop().
  void start();
  void stop();

 private:
  void stream_to(net::TcpStream& client);

  SourceFactory factory_;
  net::TcpListener listener_;
  ReplayOptions options_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

/// Client side of the frame protocol as a BlockSource.
class StreamClient : public BlockSource {
 public:
  explicit StreamClient(const net::Endpoint& server);

  double sample_rate() const override { return hello_.sample_rate_hz; }
  std::size_t channels() const override { return hello_.channels; }
  std::optional<std::uint64_t> total_samples() const override { return std::nullopt; }
  std::optional<std::vector<double>> impedances() const override { return hello_.impedances_ohm; }
  bool next(SampleBlock& block, std::size_t max_samples) override;

  const StreamHello& hello() const { return hello_; }
  /// Unblocks a pending next() from another thread; the stream then ends.
  void interrupt() { stream_.shutdown(); }
  /// DATA frames whose first sample did not follow the previous frame.
  std::size_t gap_count() const { return gaps_; }
  bool ended() const { return ended_; }

 private:
  net::TcpStream stream_;
  StreamHello hello_;
  SampleBlock pending_;
  std::size_t offset_ = 0;
  std::optional<std::uint64_t> expected_;
  std::size_t gaps_ = 0;
  bool ended_ = false;
};

}  // namespace emg::ingest
