#include "emg/ingest/stream.hpp"

#include <chrono>

#include "bytes.hpp"
#include "emg/error.hpp"

namespace emg::ingest {

using detail::get_le;
using detail::put_le;

namespace {

const unsigned char* bytes_of(const std::string& s) { return reinterpret_cast<const unsigned char*>(s.data()); }

}  // namespace

std::string encode_frame(FrameType type, const std::string& payload) {
  if (payload.size() > kMaxFramePayload) throw ParameterError("frame payload too large");
  std::string out;
  out.reserve(payload.size() + 5);
  put_le(out, static_cast<std::uint32_t>(payload.size()));
  put_le(out, static_cast<std::uint8_t>(type));
  out += payload;
  return out;
}

std::string encode_hello(const StreamHello& h) {
  std::string p;
  put_le(p, h.sample_rate_hz);
  put_le(p, h.channels);
  put_le(p, h.first_sample);
  put_le(p, static_cast<std::uint8_t>(h.impedances_ohm ? 1 : 0));
  if (h.impedances_ohm) {
    if (h.impedances_ohm->size() != h.channels) throw ParameterError("impedance count does not match channels");
    for (double z : *h.impedances_ohm) put_le(p, z);
  }
  return encode_frame(FrameType::Hello, p);
}

std::string encode_data(const SampleBlock& block, std::size_t begin, std::size_t end) {
  if (begin > end || end > block.count) throw ParameterError("block range out of bounds");
  const std::size_t n = end - begin;
  std::string p;
  p.reserve(12 + n * block.channels * 4);
  put_le(p, static_cast<std::uint64_t>(block.first_sample + begin));
  put_le(p, static_cast<std::uint32_t>(n));
  for (std::size_t c = 0; c < block.channels; ++c) {
    detail::put_floats_le(p, block.channel(c).data() + begin, n);
  }
  return encode_frame(FrameType::Data, p);
}

std::string encode_data(const SampleBlock& block) { return encode_data(block, 0, block.count); }

std::string encode_end() { return encode_frame(FrameType::End, {}); }

StreamHello decode_hello(const std::string& p) {
  if (p.size() < 19) throw DecodeError("short HELLO frame");
  const auto* b = bytes_of(p);
  StreamHello h;
  h.sample_rate_hz = get_le<double>(b);
  h.channels = get_le<std::uint16_t>(b + 8);
  h.first_sample = get_le<std::uint64_t>(b + 10);
  const bool has_imp = b[18] != 0;
  if (!(h.sample_rate_hz > 0.0) || h.channels == 0) throw DecodeError("HELLO frame has an invalid rate or channel count");
  if (has_imp) {
    if (p.size() != 19 + 8u * h.channels) throw DecodeError("HELLO frame impedance block has the wrong size");
    std::vector<double> z(h.channels);
    for (std::size_t c = 0; c < h.channels; ++c) z[c] = get_le<double>(b + 19 + 8 * c);
    h.impedances_ohm = std::move(z);
  } else if (p.size() != 19) {
    throw DecodeError("HELLO frame has trailing bytes");
  }
  return h;
}

SampleBlock decode_data(const std::string& p, std::size_t channels) {
  if (p.size() < 12) throw DecodeError("short DATA frame");
  const auto* b = bytes_of(p);
  SampleBlock block;
  const auto first = get_le<std::uint64_t>(b);
  const auto count = get_le<std::uint32_t>(b + 8);
  if (p.size() != 12 + std::size_t{count} * channels * 4) throw DecodeError("DATA frame size does not match its count");
  block.resize(channels, count);
  block.first_sample = first;
  detail::get_floats_le(b + 12, block.data.data(), block.data.size());
  return block;
}

std::optional<Frame> read_frame(net::TcpStream& stream) {
  std::uint8_t head[5];
  if (!stream.read_exact(head)) return std::nullopt;
  const auto len = get_le<std::uint32_t>(head);
  if (len > kMaxFramePayload) throw DecodeError("frame length " + std::to_string(len) + " exceeds limit");
  const auto type = head[4];
  if (type < 1 || type > 3) throw DecodeError("unknown frame type " + std::to_string(type));
  Frame f;
  f.type = static_cast<FrameType>(type);
  f.payload.resize(len);
  if (len > 0 && !stream.read_exact({reinterpret_cast<std::uint8_t*>(f.payload.data()), len})) {
    throw DecodeError("connection closed mid-frame");
  }
  return f;
}

ReplayServer::ReplayServer(SourceFactory factory, const net::Endpoint& listen, ReplayOptions options)
    : factory_(std::move(factory)), listener_(listen), options_(std::move(options)) {
  if (options_.block_samples == 0) throw ParameterError("block size must be positive");
  if (options_.speed < 0.0) throw ParameterError("speed must be nonnegative");
}

ReplayServer::~ReplayServer() { stop(); }

bool ReplayServer::serve_one(std::chrono::milliseconds accept_timeout) {
  using namespace std::chrono;
  const auto deadline = steady_clock::now() + accept_timeout;
  while (!stop_) {
    const auto left = duration_cast<milliseconds>(deadline - steady_clock::now());
    if (left.count() <= 0) return false;
    auto client = listener_.accept(std::min(left, milliseconds(100)));
    if (!client) continue;
    try {
      stream_to(*client);
    } catch (const Error&) {
      // client went away; keep serving others
    }
    return true;
  }
  return false;
}

void ReplayServer::start() {
  stop_ = false;
  thread_ = std::thread([this] {
    while (!stop_) serve_one(std::chrono::milliseconds(200));
  });
}

void ReplayServer::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void ReplayServer::stream_to(net::TcpStream& client) {
  using clock = std::chrono::steady_clock;
  auto source = factory_();
  StreamHello hello;
  hello.sample_rate_hz = source->sample_rate();
  hello.channels = static_cast<std::uint16_t>(source->channels());
  hello.impedances_ohm = source->impedances();
  auto send = [&](const std::string& bytes) {
    client.write_all({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
  };
  send(encode_hello(hello));

  const auto start = clock::now();
  SampleBlock block;
  while (!stop_ && source->next(block, options_.block_samples)) {
    if (options_.speed > 0.0) {
      // A block goes out once its last sample would have been acquired.
      const double t = static_cast<double>(block.end_sample()) / (hello.sample_rate_hz * options_.speed);
      std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(t)));
    }
    std::size_t i = 0;
    while (i < block.count) {
      const std::uint64_t s = block.first_sample + i;
      std::size_t run_end = block.count;
      bool dropped = false;
      for (const auto& [a, b] : options_.drop) {
        if (s >= a && s < b) {
          dropped = true;
          run_end = std::min<std::uint64_t>(block.count, b - block.first_sample);
          break;
        }
        if (a > s) run_end = std::min<std::uint64_t>(run_end, a - block.first_sample);
      }
      if (!dropped) send(encode_data(block, i, run_end));
      i = run_end;
    }
  }
  send(encode_end());
}

StreamClient::StreamClient(const net::Endpoint& server) : stream_(net::TcpStream::connect(server)) {
  const auto f = read_frame(stream_);
  if (!f || f->type != FrameType::Hello) throw DecodeError("stream did not start with HELLO");
  hello_ = decode_hello(f->payload);
}

bool StreamClient::next(SampleBlock& block, std::size_t max_samples) {
  if (max_samples == 0) throw ParameterError("max_samples must be positive");
  while (offset_ >= pending_.count) {
    if (ended_) return false;
    const auto f = read_frame(stream_);
    if (!f || f->type == FrameType::End) {
      ended_ = true;
      return false;
    }
    if (f->type != FrameType::Data) throw DecodeError("unexpected frame type mid-stream");
    pending_ = decode_data(f->payload, hello_.channels);
    offset_ = 0;
    if (expected_ && pending_.first_sample != *expected_) ++gaps_;
    expected_ = pending_.end_sample();
  }
  const std::size_t n = std::min(max_samples, pending_.count - offset_);
  block.resize(hello_.channels, n);
  block.first_sample = pending_.first_sample + offset_;
  for (std::size_t c = 0; c < hello_.channels; ++c) {
    const auto src = pending_.channel(c).subspan(offset_, n);
    std::copy(src.begin(), src.end(), block.channel(c).begin());
  }
  offset_ += n;
  return true;
}

}  // namespace emg::ingest
