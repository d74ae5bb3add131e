#include "emg/dsp/filter_bank.hpp"

#include <algorithm>
#include <cmath>

#include "emg/error.hpp"

namespace emg::dsp {

FilterBank::FilterBank(FilterSpec spec, std::size_t channels)
    : spec_(std::move(spec)), channels_(channels), state_(channels * spec_.sections.size() * 2, 0.0) {}

void FilterBank::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

void FilterBank::step(std::span<const double> frame, std::span<double> out) {
  if (frame.size() != channels_ || out.size() != channels_) {
    throw DataError("frame width does not match filter channel count");
  }
  for (double v : frame) {
    if (!std::isfinite(v)) throw DataError("non-finite sample in filter input");
  }
  const std::size_t per_channel = spec_.sections.size() * 2;
  for (std::size_t c = 0; c < channels_; ++c) {
    double* z = state_.data() + c * per_channel;
    double x = frame[c];
    for (const auto& s : spec_.sections) {
      const double y = s.b0 * x + z[0];
      z[0] = s.b1 * x - s.a1 * y + z[1];
      z[1] = s.b2 * x - s.a2 * y;
      x = y;
      z += 2;
    }
    out[c] = x;
  }
}

void FilterBank::process_channel(std::size_t channel, std::span<double> samples) {
  if (channel >= channels_) throw DataError("channel index out of range");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DataError("non-finite sample in filter input");
  }
  const std::size_t per_channel = spec_.sections.size() * 2;
  double* base = state_.data() + channel * per_channel;
  for (double& sample : samples) {
    double* z = base;
    double x = sample;
    for (const auto& s : spec_.sections) {
      const double y = s.b0 * x + z[0];
      z[0] = s.b1 * x - s.a1 * y + z[1];
      z[1] = s.b2 * x - s.a2 * y;
      x = y;
      z += 2;
    }
    sample = x;
  }
}

std::vector<double> filter_signal(const FilterSpec& spec, std::span<const double> signal) {
  FilterBank bank(spec, 1);
  std::vector<double> out(signal.begin(), signal.end());
  bank.process_channel(0, out);
  return out;
}

}  // namespace emg::dsp
