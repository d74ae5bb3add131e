#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace emg {

/// A run of consecutive multi-channel samples, channel-major:
/// data[channel * count + t].
struct SampleBlock {
  std::size_t channels = 0;
  std::size_t count = 0;
  std::uint64_t first_sample = 0;
  std::vector<float> data;

  std::span<const float> channel(std::size_t c) const { return {data.data() + c * count, count}; }
  std::span<float> channel(std::size_t c) { return {data.data() + c * count, count}; }
  std::uint64_t end_sample() const { return first_sample + count; }

  void resize(std::size_t channel_count, std::size_t sample_count) {
    channels = channel_count;
    count = sample_count;
    data.assign(channel_count * sample_count, 0.0f);
  }
};

}  // namespace emg
