#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emg/dsp/butterworth.hpp"

namespace emg::dsp {

/// Multi-channel streaming realization of a FilterSpec (transposed direct
/// form II per section). State layout: channel-major, 2 registers per section.
class FilterBank {
 public:
  FilterBank(FilterSpec spec, std::size_t channels);

  const FilterSpec& spec() const { return spec_; }
  std::size_t channels() const { return channels_; }
  std::span<const double> state() const { return state_; }

  void reset();

  /// One frame (one sample per channel). Throws DataError on non-finite input,
  /// leaving the state untouched.
  void step(std::span<const double> frame, std::span<double> out);

  /// Filters `count` consecutive samples of one channel in place.
  void process_channel(std::size_t channel, std::span<double> samples);

 private:
  FilterSpec spec_;
  std::size_t channels_;
  std::vector<double> state_;
};

/// One-shot filtering of a single-channel signal from zero state.
std::vector<double> filter_signal(const FilterSpec& spec, std::span<const double> signal);

}  // namespace emg::dsp
