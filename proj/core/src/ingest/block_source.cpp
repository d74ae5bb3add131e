#include "emg/ingest/block_source.hpp"

#include <algorithm>

#include "emg/ingest/recording.hpp"

namespace emg::ingest {

RecordingSource::RecordingSource(const Recording& recording) : recording_(recording) {}

double RecordingSource::sample_rate() const { return recording_.sample_rate_hz; }
std::size_t RecordingSource::channels() const { return recording_.channels; }
std::optional<std::uint64_t> RecordingSource::total_samples() const { return recording_.sample_count; }
std::optional<std::vector<double>> RecordingSource::impedances() const { return recording_.impedances_ohm; }

bool RecordingSource::next(SampleBlock& block, std::size_t max_samples) {
  if (cursor_ >= recording_.sample_count || max_samples == 0) return false;
  const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(max_samples, recording_.sample_count - cursor_));
  block.resize(recording_.channels, n);
  block.first_sample = cursor_;
  for (std::size_t c = 0; c < recording_.channels; ++c) {
    const float* src = recording_.samples.data() + c * recording_.sample_count + cursor_;
    std::copy(src, src + n, block.channel(c).data());
  }
  cursor_ += n;
  return true;
}

}  // namespace emg::ingest
