#include "emg/ingest/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emg/dsp/feature_pipeline.hpp"
#include "emg/error.hpp"

namespace emg::ingest {

std::vector<int> LabeledDataset::label_ids() const {
  std::vector<int> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(static_cast<int>(index_of(w.label)));
  return out;
}

std::size_t LabeledDataset::count(Gesture g) const {
  return static_cast<std::size_t>(
      std::count_if(windows.begin(), windows.end(), [g](const LabeledWindow& w) { return w.label == g; }));
}

LabeledDataset label_windows(const CueSchedule& schedule, double sample_rate_hz, std::uint64_t total_samples,
                             int window_samples, std::string recording_id) {
  if (window_samples < 1) throw ParameterError("window length must be positive");
  if (!(sample_rate_hz > 0.0)) throw ParameterError("sample rate must be positive");
  const auto n = static_cast<std::uint64_t>(window_samples);
  const auto label_len = static_cast<std::uint64_t>(std::llround(schedule.timing.label_s * sample_rate_hz));
  const std::uint64_t per_cue = label_len / n;

  LabeledDataset out;
  out.recording_id = std::move(recording_id);
  out.window_samples = window_samples;
  for (const auto& cue : schedule.entries) {
    const auto hold_end = static_cast<std::uint64_t>(std::llround(schedule.hold_end(cue) * sample_rate_hz));
    if (hold_end > total_samples) {
      throw DataError("recording shorter than cue schedule: cue " + std::to_string(cue.index) + " (" +
                      std::string(gesture_name(cue.gesture)) + ") is not covered");
    }
    if (cue.discarded) continue;
    const std::uint64_t first = hold_end - label_len;
    for (std::uint64_t w = 0; w < per_cue; ++w) {
      out.windows.push_back({first + w * n, cue.gesture, cue.index, static_cast<std::size_t>(w)});
    }
  }
  return out;
}

Eigen::MatrixXd extract_window_rms(BlockSource& source, const dsp::ChannelMask& mask, const dsp::FilterSpec& filter,
                                   const LabeledDataset& dataset) {
  dsp::StreamingFeatureExtractor extractor(mask, filter, dataset.window_samples);
  const auto n = static_cast<std::uint64_t>(dataset.window_samples);

  std::vector<std::size_t> order(dataset.windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset.windows[a].start_sample < dataset.windows[b].start_sample;
  });

  Eigen::MatrixXd out(static_cast<Eigen::Index>(dataset.windows.size()),
                      static_cast<Eigen::Index>(mask.accepted_count()));
  std::size_t next = 0;
  SampleBlock block;
  while (next < order.size() && source.next(block, 4096)) {
    std::size_t offset = 0;
    while (next < order.size()) {
      const std::uint64_t end = dataset.windows[order[next]].start_sample + n;
      if (end > block.end_sample()) break;
      const auto stop = static_cast<std::size_t>(end - block.first_sample);
      if (stop > offset) {
        extractor.push(block, offset, stop);
        offset = stop;
      }
      out.row(static_cast<Eigen::Index>(order[next])) = extractor.latest_rms().transpose();
      ++next;
    }
    extractor.push(block, offset, block.count);
  }
  if (next < order.size()) throw DataError("source ended before every labeled window was seen");
  return out;
}

}  // namespace emg::ingest
