#include "emg/ingest/paced_source.hpp"

#include <thread>

#include "emg/error.hpp"

namespace emg::ingest {

PacedSource::PacedSource(std::unique_ptr<BlockSource> inner, double speed) : inner_(std::move(inner)), speed_(speed) {
  if (!inner_) throw ParameterError("paced source needs an inner source");
  if (!(speed > 0.0)) throw ParameterError("speed must be positive");
}

bool PacedSource::next(SampleBlock& block, std::size_t max_samples) {
  if (!started_) {
    start_ = std::chrono::steady_clock::now();
    started_ = true;
  }
  if (!inner_->next(block, max_samples)) return false;
  const double t = static_cast<double>(block.end_sample()) / (sample_rate() * speed_);
  std::this_thread::sleep_until(
      start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(t)));
  return true;
}

}  // namespace emg::ingest
