#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "emg/ingest/block_source.hpp"

namespace emg::ingest {

/// In-memory multi-channel recording, f32 samples channel-major.
struct Recording {
  double sample_rate_hz = 4000.0;
  std::uint16_t channels = 0;
  std::uint64_t sample_count = 0;
  std::vector<float> samples;  // samples[c * sample_count + t]
  std::optional<std::vector<double>> impedances_ohm;

  float at(std::size_t channel, std::uint64_t t) const { return samples[channel * sample_count + t]; }
  friend bool operator==(const Recording&, const Recording&) = default;
};

inline constexpr std::uint16_t kRecordingVersion = 1;
inline constexpr std::size_t kRecordingHeaderBytes = 24;

/// Binary layout, little-endian:
///   "EMGR" | u16 version | f64 rate | u16 channels | u64 samples
///   | f32 samples, channel-major
///   | optional "IMPD" + f64 per channel
void recording_write(const Recording& recording, const std::filesystem::path& path);
Recording recording_read(const std::filesystem::path& path);

/// Drains a source into memory.
Recording materialize(BlockSource& source);

/// Streams samples into a recording file without holding them in memory.
class RecordingWriter {
 public:
  RecordingWriter(const std::filesystem::path& path, double sample_rate_hz, std::uint16_t channels,
                  std::uint64_t sample_count);
  void write(const SampleBlock& block);
  void finish(const std::optional<std::vector<double>>& impedances_ohm);

 private:
  std::ofstream out_;
  std::uint16_t channels_;
  std::uint64_t sample_count_;
  std::uint64_t written_ = 0;
};

/// Streams a recording file block by block.
class RecordingFileSource : public BlockSource {
 public:
  explicit RecordingFileSource(const std::filesystem::path& path);

  double sample_rate() const override { return rate_; }
  std::size_t channels() const override { return channels_; }
  std::optional<std::uint64_t> total_samples() const override { return count_; }
  std::optional<std::vector<double>> impedances() const override { return impedances_; }
  bool next(SampleBlock& block, std::size_t max_samples) override;

 private:
  std::ifstream in_;
  double rate_ = 0.0;
  std::uint16_t channels_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t cursor_ = 0;
  std::optional<std::vector<double>> impedances_;
};

}  // namespace emg::ingest
