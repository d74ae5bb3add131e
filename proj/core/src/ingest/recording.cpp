#include "emg/ingest/recording.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "bytes.hpp"
#include "emg/error.hpp"

namespace emg::ingest {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'G', 'R'};
constexpr std::array<char, 4> kImpedanceTag = {'I', 'M', 'P', 'D'};

std::string encode_header(double rate, std::uint16_t channels, std::uint64_t count) {
  std::string h(kMagic.begin(), kMagic.end());
  detail::put_le<std::uint16_t>(h, kRecordingVersion);
  detail::put_le<double>(h, rate);
  detail::put_le<std::uint16_t>(h, channels);
  detail::put_le<std::uint64_t>(h, count);
  return h;
}

std::string encode_impedances(const std::vector<double>& z) {
  std::string out(kImpedanceTag.begin(), kImpedanceTag.end());
  for (double v : z) detail::put_le<double>(out, v);
  return out;
}

struct Header {
  double rate;
  std::uint16_t channels;
  std::uint64_t count;
};

/// Validates the header and the optional trailer against the file size; on
/// success `in` is positioned at the first sample.
Header read_header(std::ifstream& in, std::uint64_t file_size, std::optional<std::vector<double>>& impedances) {
  std::array<unsigned char, kRecordingHeaderBytes> buf{};
  if (file_size < kRecordingHeaderBytes) {
    throw DecodeError("unexpected end of header at offset " + std::to_string(file_size));
  }
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) throw DecodeError("bad magic: not an EMGR recording");
  const auto version = detail::get_le<std::uint16_t>(buf.data() + 4);
  if (version != kRecordingVersion) throw DecodeError("unsupported recording version " + std::to_string(version));
  Header h{detail::get_le<double>(buf.data() + 6), detail::get_le<std::uint16_t>(buf.data() + 14),
           detail::get_le<std::uint64_t>(buf.data() + 16)};
  if (!(h.rate > 0.0)) throw DecodeError("recording sample rate must be positive");

  const std::uint64_t sample_bytes = h.count * h.channels * sizeof(float);
  const std::uint64_t samples_end = kRecordingHeaderBytes + sample_bytes;
  if (file_size < samples_end) throw DecodeError("unexpected end of samples at offset " + std::to_string(file_size));

  const std::uint64_t trailer = file_size - samples_end;
  if (trailer != 0) {
    const std::uint64_t expected = kImpedanceTag.size() + 8ull * h.channels;
    if (trailer != expected) throw DecodeError("malformed impedance block at offset " + std::to_string(samples_end));
    std::string raw(expected, '\0');
    in.seekg(static_cast<std::streamoff>(samples_end));
    in.read(raw.data(), static_cast<std::streamsize>(expected));
    if (std::memcmp(raw.data(), kImpedanceTag.data(), kImpedanceTag.size()) != 0) {
      throw DecodeError("malformed impedance block at offset " + std::to_string(samples_end));
    }
    std::vector<double> z(h.channels);
    for (std::size_t c = 0; c < h.channels; ++c) {
      z[c] = detail::get_le<double>(reinterpret_cast<const unsigned char*>(raw.data()) + 4 + 8 * c);
    }
    impedances = std::move(z);
    in.seekg(static_cast<std::streamoff>(kRecordingHeaderBytes));
  }
  return h;
}

}  // namespace

void recording_write(const Recording& rec, const std::filesystem::path& path) {
  if (rec.samples.size() != static_cast<std::size_t>(rec.channels) * rec.sample_count) {
    throw DataError("recording sample buffer does not match channels x sample_count");
  }
  if (rec.impedances_ohm && rec.impedances_ohm->size() != rec.channels) {
    throw DataError("impedance count does not match channel count");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const std::string header = encode_header(rec.sample_rate_hz, rec.channels, rec.sample_count);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::string chunk;
  constexpr std::size_t kChunk = 1 << 16;
  for (std::size_t i = 0; i < rec.samples.size(); i += kChunk) {
    chunk.clear();
    detail::put_floats_le(chunk, rec.samples.data() + i, std::min(kChunk, rec.samples.size() - i));
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  }
  if (rec.impedances_ohm) {
    const std::string imp = encode_impedances(*rec.impedances_ohm);
    out.write(imp.data(), static_cast<std::streamsize>(imp.size()));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Recording recording_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("recording not found: " + path.string());
  const auto size = static_cast<std::uint64_t>(std::filesystem::file_size(path));
  Recording rec;
  const Header h = read_header(in, size, rec.impedances_ohm);
  rec.sample_rate_hz = h.rate;
  rec.channels = h.channels;
  rec.sample_count = h.count;
  rec.samples.resize(static_cast<std::size_t>(h.count) * h.channels);
  std::vector<unsigned char> raw;
  constexpr std::size_t kChunk = 1 << 16;
  for (std::size_t i = 0; i < rec.samples.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, rec.samples.size() - i);
    raw.resize(n * sizeof(float));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw DecodeError("unexpected end of samples at offset " + std::to_string(kRecordingHeaderBytes + i * 4));
    detail::get_floats_le(raw.data(), rec.samples.data() + i, n);
  }
  return rec;
}

Recording materialize(BlockSource& source) {
  Recording rec;
  rec.sample_rate_hz = source.sample_rate();
  rec.channels = static_cast<std::uint16_t>(source.channels());
  rec.impedances_ohm = source.impedances();
  std::vector<std::vector<float>> per_channel(rec.channels);
  SampleBlock block;
  while (source.next(block, 8192)) {
    for (std::size_t c = 0; c < rec.channels; ++c) {
      const auto ch = block.channel(c);
      per_channel[c].insert(per_channel[c].end(), ch.begin(), ch.end());
    }
  }
  rec.sample_count = rec.channels ? per_channel[0].size() : 0;
  rec.samples.reserve(static_cast<std::size_t>(rec.sample_count) * rec.channels);
  for (auto& ch : per_channel) rec.samples.insert(rec.samples.end(), ch.begin(), ch.end());
  return rec;
}

RecordingWriter::RecordingWriter(const std::filesystem::path& path, double sample_rate_hz, std::uint16_t channels,
                                 std::uint64_t sample_count)
    : out_(path, std::ios::binary | std::ios::trunc), channels_(channels), sample_count_(sample_count) {
  if (!out_) throw Error("cannot write " + path.string());
  const std::string header = encode_header(sample_rate_hz, channels, sample_count);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void RecordingWriter::write(const SampleBlock& block) {
  if (block.channels != channels_) throw DataError("block channel count does not match recording");
  if (block.first_sample != written_) throw DataError("recording writer expects consecutive blocks");
  if (written_ + block.count > sample_count_) throw DataError("block exceeds declared sample count");
  std::string chunk;
  for (std::size_t c = 0; c < channels_; ++c) {
    chunk.clear();
    detail::put_floats_le(chunk, block.channel(c).data(), block.count);
    const std::uint64_t offset = kRecordingHeaderBytes + (c * sample_count_ + block.first_sample) * sizeof(float);
    out_.seekp(static_cast<std::streamoff>(offset));
    out_.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  }
  written_ += block.count;
}

void RecordingWriter::finish(const std::optional<std::vector<double>>& impedances_ohm) {
  if (written_ != sample_count_) throw DataError("recording writer finished before all samples were written");
  out_.seekp(static_cast<std::streamoff>(kRecordingHeaderBytes + sample_count_ * channels_ * sizeof(float)));
  if (impedances_ohm) {
    if (impedances_ohm->size() != channels_) throw DataError("impedance count does not match channel count");
    const std::string imp = encode_impedances(*impedances_ohm);
    out_.write(imp.data(), static_cast<std::streamsize>(imp.size()));
  }
  out_.flush();
  if (!out_) throw Error("recording write failed");
  out_.close();
}

RecordingFileSource::RecordingFileSource(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw DataError("recording not found: " + path.string());
  const Header h = read_header(in_, std::filesystem::file_size(path), impedances_);
  rate_ = h.rate;
  channels_ = h.channels;
  count_ = h.count;
}

bool RecordingFileSource::next(SampleBlock& block, std::size_t max_samples) {
  if (cursor_ >= count_ || max_samples == 0) return false;
  const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(max_samples, count_ - cursor_));
  block.resize(channels_, n);
  block.first_sample = cursor_;
  std::vector<unsigned char> raw(n * sizeof(float));
  for (std::size_t c = 0; c < channels_; ++c) {
    in_.seekg(static_cast<std::streamoff>(kRecordingHeaderBytes + (c * count_ + cursor_) * sizeof(float)));
    in_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in_) throw DecodeError("unexpected end of samples while streaming recording");
    detail::get_floats_le(raw.data(), block.channel(c).data(), n);
  }
  cursor_ += n;
  return true;
}

}  // namespace emg::ingest
