#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "emg/decode/decoder.hpp"
#include "emg/dsp/feature_pipeline.hpp"
#include "emg/ingest/block_source.hpp"

namespace emg::decode {

/// Sample index at which tick k (1-based) fires: round(k * period).
std::uint64_t tick_boundary(std::uint64_t k, double period_samples);

/// Drives a Decoder from a BlockSource on a sample-clock tick schedule.
/// Each tick consumes the newest N-sample window ending at the boundary;
/// ticks whose window is incomplete (stream start, or a gap inside the
/// last N samples) are skipped.
class StreamDecoder {
 public:
  /// Called after every decoder tick with the absolute end sample of the
  /// window. Return false to stop.
  using TickFn = std::function<bool(const DecodeTick&, std::uint64_t window_end)>;

  StreamDecoder(Decoder& decoder, double period_samples);

  /// Runs until the source is exhausted or the callback stops it. Returns
  /// the number of ticks emitted.
  std::uint64_t run(ingest::BlockSource& source, const TickFn& on_tick);

  std::uint64_t skipped_ticks() const { return skipped_; }
  std::size_t gap_count() const { return gaps_; }

 private:
  Decoder& decoder_;
  double period_;
  std::uint64_t skipped_ = 0;
  std::size_t gaps_ = 0;
};

/// One JSON line describing a decoder tick.
std::string tick_to_json(const DecodeTick& tick, std::uint64_t window_end_sample);

}  // namespace emg::decode
