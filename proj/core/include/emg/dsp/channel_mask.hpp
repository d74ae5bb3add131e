#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emg::dsp {

inline constexpr double kDefaultImpedanceThresholdOhm = 500e3;

/// Which raw channels survive impedance-based rejection.
struct ChannelMask {
  std::vector<bool> accepted;

  static ChannelMask all(std::size_t channel_count) { return {std::vector<bool>(channel_count, true)}; }

  std::size_t channel_count() const { return accepted.size(); }
  std::size_t accepted_count() const;
  /// Raw channel indices of accepted channels, ascending.
  std::vector<std::size_t> accepted_indices() const;

  friend bool operator==(const ChannelMask&, const ChannelMask&) = default;
};

/// Accepts a channel iff its impedance is <= threshold. Throws DataError when
/// nothing survives.
ChannelMask reject_channels(std::span<const double> impedances_ohm,
                            double threshold_ohm = kDefaultImpedanceThresholdOhm);

}  // namespace emg::dsp
