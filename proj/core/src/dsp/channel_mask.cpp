#include "emg/dsp/channel_mask.hpp"

#include <algorithm>
#include <cmath>

#include "emg/error.hpp"

namespace emg::dsp {

std::size_t ChannelMask::accepted_count() const {
  return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), true));
}

std::vector<std::size_t> ChannelMask::accepted_indices() const {
  std::vector<std::size_t> out;
  out.reserve(accepted.size());
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (accepted[i]) out.push_back(i);
  }
  return out;
}

ChannelMask reject_channels(std::span<const double> impedances_ohm, double threshold_ohm) {
  if (!(threshold_ohm > 0.0) || !std::isfinite(threshold_ohm)) {
    throw ParameterError("impedance threshold must be positive");
  }
  ChannelMask mask;
  mask.accepted.reserve(impedances_ohm.size());
  for (double z : impedances_ohm) {
    if (!std::isfinite(z) || z < 0.0) throw DataError("impedances must be finite and nonnegative");
    mask.accepted.push_back(z <= threshold_ohm);
  }
  if (mask.accepted_count() == 0) throw DataError("no usable channels");
  return mask;
}

}  // namespace emg::dsp
