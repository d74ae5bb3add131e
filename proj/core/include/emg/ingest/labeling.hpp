#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emg/dsp/butterworth.hpp"
#include "emg/dsp/channel_mask.hpp"
#include "emg/gesture.hpp"
#include "emg/ingest/block_source.hpp"
#include "emg/ingest/cue_schedule.hpp"

namespace emg::ingest {

/// A labeled N-sample span of a recording, by absolute sample index.
struct LabeledWindow {
  std::uint64_t start_sample = 0;
  Gesture label = Gesture::Rest;
  std::size_t cue_index = 0;
  std::size_t window_index = 0;
};

struct LabeledDataset {
  std::string recording_id;
  int window_samples = 1000;
  std::vector<LabeledWindow> windows;

  std::vector<int> label_ids() const;
  std::size_t count(Gesture g) const;
};

/// floor(label_s * rate / N) back-to-back windows per non-discarded cue,
/// starting at the beginning of the labeled tail of the hold phase.
/// Throws DataError naming the first cue the recording does not cover.
LabeledDataset label_windows(const CueSchedule& schedule, double sample_rate_hz, std::uint64_t total_samples,
                             int window_samples, std::string recording_id = {});

/// Runs the causal front end over the whole source and returns the RMS of
/// every labeled window (rows in dataset order, columns = accepted channels).
Eigen::MatrixXd extract_window_rms(BlockSource& source, const dsp::ChannelMask& mask,
                                   const dsp::FilterSpec& filter, const LabeledDataset& dataset);

}  // namespace emg::ingest
