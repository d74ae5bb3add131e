#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "emg/sample_block.hpp"

namespace emg::ingest {

struct Recording;

/// Forward-only producer of consecutive sample blocks.
class BlockSource {
 public:
  virtual ~BlockSource() = default;

  virtual double sample_rate() const = 0;
  virtual std::size_t channels() const = 0;
  /// Known length, or nullopt for live streams.
  virtual std::optional<std::uint64_t> total_samples() const = 0;
  virtual std::optional<std::vector<double>> impedances() const { return std::nullopt; }

  /// Replaces `block` with up to `max_samples` following samples. Returns
  /// false once the source is exhausted.
  virtual bool next(SampleBlock& block, std::size_t max_samples) = 0;
};

/// Serves an in-memory recording (not owned).
class RecordingSource : public BlockSource {
 public:
  explicit RecordingSource(const Recording& recording);

  double sample_rate() const override;
  std::size_t channels() const override;
  std::optional<std::uint64_t> total_samples() const override;
  std::optional<std::vector<double>> impedances() const override;
  bool next(SampleBlock& block, std::size_t max_samples) override;

 private:
  const Recording& recording_;
  std::uint64_t cursor_ = 0;
};

}  // namespace emg::ingest
