#pragma once

#include <cstddef>
#include <utility>

namespace emg::dsp {

/// Row-major electrode grid: channel = row * cols + col.
struct ElectrodeArray {
  std::size_t rows = 8;
  std::size_t cols = 8;
  double tangential_mm = 10.0;
  double axial_mm = 15.0;

  constexpr std::size_t channel_count() const { return rows * cols; }
  constexpr std::size_t channel_at(std::size_t row, std::size_t col) const { return row * cols + col; }
  constexpr std::pair<std::size_t, std::size_t> grid_position(std::size_t channel) const {
    return {channel / cols, channel % cols};
  }
};

}  // namespace emg::dsp
