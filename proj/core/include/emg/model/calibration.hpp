#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "emg/dsp/channel_mask.hpp"
#include "emg/ingest/block_source.hpp"
#include "emg/ingest/cue_schedule.hpp"
#include "emg/ingest/labeling.hpp"
#include "emg/model/bundle.hpp"
#include "emg/model/trainer.hpp"

namespace emg::model {

struct CalibrationOptions {
  double impedance_threshold_ohm = dsp::kDefaultImpedanceThresholdOhm;
  int filter_order = 4;
  double cutoff_hz = 120.0;
  int window_samples = dsp::kDefaultWindowSamples;
  int components = dsp::kDefaultPcaComponents;
  TrainConfig train;
};

/// Labeled RMS windows of one session.
struct SessionData {
  ingest::LabeledDataset dataset;
  Eigen::MatrixXd rms;  // windows x accepted channels
  std::vector<int> labels;
  dsp::ChannelMask mask;
  dsp::FilterSpec filter;
};

/// Labels the schedule against the source and extracts window RMS. Without
/// an explicit mask, channels are rejected from the source's impedances (all
/// accepted when the source has none).
SessionData collect_session(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                            const CalibrationOptions& options, std::optional<dsp::ChannelMask> mask = std::nullopt);

/// Stratified split, then normalizer and PCA fit on the training windows
/// only, then network training with validation-based epoch selection.
/// K is min(options.components, accepted channels).
ModelBundle fit_bundle(const SessionData& session, const CalibrationOptions& options);

ModelBundle calibrate(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                      const CalibrationOptions& options);

/// Fresh pipeline and network trained only on the new session; the previous
/// bundle's channel mask is kept.
ModelBundle recalibrate(ingest::BlockSource& source, const ingest::CueSchedule& schedule,
                        const ModelBundle& previous, const CalibrationOptions& options);

/// Applies a fitted pipeline to RMS rows.
Eigen::MatrixXd transform_rms(const dsp::FeaturePipeline& pipeline, const Eigen::MatrixXd& rms);

/// Confusion matrix of a bundle over every labeled window of a session.
ConfusionMatrix evaluate_bundle(const ModelBundle& bundle, ingest::BlockSource& source,
                                const ingest::CueSchedule& schedule);

}  // namespace emg::model
