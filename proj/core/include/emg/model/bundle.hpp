#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "emg/dsp/feature_pipeline.hpp"
#include "emg/model/confusion.hpp"
#include "emg/model/mlp.hpp"
#include "emg/model/trainer.hpp"

namespace emg::model {

inline constexpr int kBundleVersion = 1;

/// Everything inference needs, plus how it was produced.
struct ModelBundle {
  std::string id;
  dsp::FeaturePipeline pipeline;
  Mlp network;
  TrainingHistory history;
  ConfusionMatrix test_confusion;
  TrainConfig train_config;
  double impedance_threshold_ohm = dsp::kDefaultImpedanceThresholdOhm;
  std::size_t train_windows = 0;
  std::size_t validation_windows = 0;
  std::size_t test_windows = 0;

  /// RMS of the accepted channels -> class probabilities.
  Eigen::VectorXd probabilities(const Eigen::VectorXd& rms) const;
};

/// Hex FNV-1a digest of the network parameters and pipeline.
std::string compute_bundle_id(const ModelBundle& bundle);

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
/// Throws DataError("bundle not found: ...") for a missing file.
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace emg::model
