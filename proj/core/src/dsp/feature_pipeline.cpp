#include "emg/dsp/feature_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "emg/error.hpp"

namespace emg::dsp {

Eigen::VectorXd FeaturePipeline::features_from_rms(const Eigen::VectorXd& rms) const {
  return pca_project(pca, normalize(normalizer, rms));
}

StreamingFeatureExtractor::StreamingFeatureExtractor(const ChannelMask& mask, const FilterSpec& filter,
                                                     int window_samples)
    : channels_(mask.accepted_indices()),
      raw_channels_(mask.channel_count()),
      bank_(filter, channels_.size()),
      window_(static_cast<std::size_t>(window_samples)),
      ring_(channels_.size() * static_cast<std::size_t>(std::max(window_samples, 0)), 0.0) {
  if (window_samples < 1) throw ParameterError("window length must be positive");
  if (channels_.empty()) throw DataError("no usable channels");
}

void StreamingFeatureExtractor::reset() {
  bank_.reset();
  std::fill(ring_.begin(), ring_.end(), 0.0);
  head_ = 0;
  filled_ = 0;
  next_sample_ = 0;
  started_ = false;
  gaps_ = 0;
}

void StreamingFeatureExtractor::push(const SampleBlock& block, std::size_t begin, std::size_t end) {
  if (block.channels != raw_channels_) throw DataError("block channel count does not match channel mask");
  if (begin > end || end > block.count) throw DataError("block range out of bounds");
  if (begin == end) return;

  const std::uint64_t first = block.first_sample + begin;
  if (started_ && first != next_sample_) {
    if (first < next_sample_) throw DataError("samples arrived out of order");
    ++gaps_;
    filled_ = 0;
  }

  const std::size_t n = end - begin;
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const auto src = block.channel(channels_[m]).subspan(begin, n);
    scratch_.assign(src.begin(), src.end());
    bank_.process_channel(m, scratch_);
    double* ring = ring_.data() + m * window_;
    std::size_t pos = head_;
    for (double v : scratch_) {
      ring[pos] = v;
      if (++pos == window_) pos = 0;
    }
  }
  head_ = (head_ + n) % window_;
  filled_ = std::min(window_, filled_ + n);
  next_sample_ = first + n;
  started_ = true;
}

Eigen::VectorXd StreamingFeatureExtractor::latest_rms() const {
  if (!window_ready()) throw DataError("window not ready");
  Eigen::VectorXd out(static_cast<Eigen::Index>(channels_.size()));
  const double n = static_cast<double>(window_);
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const double* ring = ring_.data() + m * window_;
    double acc = 0.0;
    // oldest sample sits at head_
    for (std::size_t i = head_; i < window_; ++i) acc += ring[i] * ring[i];
    for (std::size_t i = 0; i < head_; ++i) acc += ring[i] * ring[i];
    out[static_cast<Eigen::Index>(m)] = std::sqrt(acc / n);
  }
  return out;
}

Eigen::MatrixXd StreamingFeatureExtractor::latest_window() const {
  if (!window_ready()) throw DataError("window not ready");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(window_), static_cast<Eigen::Index>(channels_.size()));
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const double* ring = ring_.data() + m * window_;
    for (std::size_t i = 0; i < window_; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = ring[(head_ + i) % window_];
    }
  }
  return out;
}

}  // namespace emg::dsp
