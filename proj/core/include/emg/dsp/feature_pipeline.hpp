#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "emg/dsp/butterworth.hpp"
#include "emg/dsp/channel_mask.hpp"
#include "emg/dsp/features.hpp"
#include "emg/dsp/filter_bank.hpp"
#include "emg/sample_block.hpp"

namespace emg::dsp {

/// Fitted preprocessing chain: mask -> high-pass -> RMS -> z-score -> PCA.
/// Immutable once fit; share read-only.
struct FeaturePipeline {
  ChannelMask mask;
  FilterSpec filter;
  int window_samples = kDefaultWindowSamples;
  Normalizer normalizer;
  PcaBasis pca;

  std::size_t accepted_channels() const { return mask.accepted_count(); }
  int feature_dim() const { return static_cast<int>(pca.output_dim()); }

  /// RMS of the accepted channels -> K-dimensional feature vector.
  Eigen::VectorXd features_from_rms(const Eigen::VectorXd& rms) const;
};

/// Causal front end for one stream: drops rejected channels, filters, and
/// keeps the last N filtered samples of every accepted channel.
///
/// Blocks must arrive in sample order. A block whose first sample does not
/// follow the previous one is a gap: filtering continues, but the window
/// buffer restarts so no window ever spans the gap.
class StreamingFeatureExtractor {
 public:
  StreamingFeatureExtractor(const ChannelMask& mask, const FilterSpec& filter, int window_samples);

  /// Feeds samples [begin, end) of `block` (offsets within the block).
  void push(const SampleBlock& block, std::size_t begin, std::size_t end);
  void push(const SampleBlock& block) { push(block, 0, block.count); }

  bool window_ready() const { return filled_ >= window_; }
  /// Absolute index one past the newest sample consumed.
  std::uint64_t end_sample() const { return next_sample_; }
  std::size_t gap_count() const { return gaps_; }
  std::size_t accepted_channels() const { return channels_.size(); }
  int window_samples() const { return static_cast<int>(window_); }

  /// RMS over the newest window. Throws DataError unless window_ready().
  Eigen::VectorXd latest_rms() const;
  /// Newest filtered window, N x M.
  Eigen::MatrixXd latest_window() const;

  void reset();

 private:
  std::vector<std::size_t> channels_;
  std::size_t raw_channels_;
  FilterBank bank_;
  std::size_t window_;
  std::vector<double> ring_;  // M x N, channel-major
  std::size_t head_ = 0;      // next write slot
  std::size_t filled_ = 0;
  std::uint64_t next_sample_ = 0;
  bool started_ = false;
  std::size_t gaps_ = 0;
  std::vector<double> scratch_;
};

}  // namespace emg::dsp
