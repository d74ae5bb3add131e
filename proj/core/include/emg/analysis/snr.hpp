#pragma once

#include <optional>

#include <Eigen/Dense>

#include "emg/dsp/butterworth.hpp"
#include "emg/dsp/channel_mask.hpp"
#include "emg/gesture.hpp"
#include "emg/ingest/block_source.hpp"
#include "emg/ingest/cue_schedule.hpp"

namespace emg::analysis {

/// sqrt(sum m^2 / sum r^2) over every channel and time step. Inputs are
/// samples x channels with equal channel counts. Throws DataError
/// "degenerate rest signal" when the rest energy is zero.
double snr(const Eigen::MatrixXd& mvc, const Eigen::MatrixXd& rest);

struct SessionSnr {
  double snr = 0.0;
  double mvc_rms = 0.0;
  double rest_rms = 0.0;
  std::size_t mvc_cues = 0;
  std::size_t rest_cues = 0;
};

/// SNR of a cued session: the filtered final `label_s` seconds of every
/// `mvc` cue against those of every Rest cue, accepted channels only.
/// Mean squares are used so unequal cue counts do not bias the ratio; with
/// equal counts this equals the pooled-sum form.
SessionSnr session_snr(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                       const dsp::ChannelMask& mask, const dsp::FilterSpec& filter,
                       Gesture mvc = Gesture::FingersClosed);

}  // namespace emg::analysis
