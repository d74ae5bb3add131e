#pragma once

#include <chrono>
#include <memory>

#include "emg/ingest/block_source.hpp"

namespace emg::ingest {

/// Releases blocks of an inner source no faster than wall-clock time
/// times `speed`.
class PacedSource : public BlockSource {
 public:
  PacedSource(std::unique_ptr<BlockSource> inner, double speed = 1.0);

  double sample_rate() const override { return inner_->sample_rate(); }
  std::size_t channels() const override { return inner_->channels(); }
  std::optional<std::uint64_t> total_samples() const override { return inner_->total_samples(); }
  std::optional<std::vector<double>> impedances() const override { return inner_->impedances(); }
  bool next(SampleBlock& block, std::size_t max_samples) override;

 private:
  std::unique_ptr<BlockSource> inner_;
  double speed_;
  std::chrono::steady_clock::time_point start_;
  bool started_ = false;
};

}  // namespace emg::ingest
