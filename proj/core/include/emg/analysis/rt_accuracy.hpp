#pragma once

#include <cstdint>
#include <vector>

#include "emg/analysis/stats.hpp"
#include "emg/gesture.hpp"
#include "emg/ingest/block_source.hpp"
#include "emg/ingest/cue_schedule.hpp"
#include "emg/model/bundle.hpp"

namespace emg::analysis {

/// Classifier output attributed to the sample that ends its window.
struct TimedPrediction {
  std::uint64_t window_end = 0;
  Gesture predicted = Gesture::Rest;
};

struct CueAccuracy {
  std::size_t cue_index = 0;
  Gesture gesture = Gesture::Rest;
  std::size_t predictions = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  bool flagged = false;  // fewer than the minimum prediction count
};

struct RtAccuracyReport {
  std::vector<CueAccuracy> cues;
  double mean = 0.0;
  double median = 0.0;
  std::size_t flagged = 0;
  std::size_t min_predictions_per_hold = 0;
  double tick_period_samples = 0.0;
  LinearFit trend;  // accuracy against 1-based cue number
};

struct RtHarnessOptions {
  /// 600 samples at 4 kHz yields exactly 20 predictions per 3 s hold.
  double tick_period_samples = 600.0;
  std::size_t min_predictions = 20;
};

/// Scores predictions whose window ends in (hold_start, hold_end] of each
/// non-discarded cue.
RtAccuracyReport score_predictions(const ingest::CueSchedule& schedule, double sample_rate_hz,
                                   const std::vector<TimedPrediction>& predictions, std::size_t min_predictions = 20);

/// Runs the decoder over `source` on the harness tick schedule and scores
/// the classifier's per-tick predictions.
RtAccuracyReport realtime_accuracy(const model::ModelBundle& bundle, ingest::BlockSource& source,
                                   const ingest::CueSchedule& schedule, const RtHarnessOptions& options = {});

}  // namespace emg::analysis
