#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emg/dsp/channel_mask.hpp"
#include "emg/dsp/electrode.hpp"
#include "emg/gesture.hpp"

namespace emg::analysis {

enum class DatasetTag { Initial, Recalibration };
std::string_view dataset_tag_name(DatasetTag tag);

struct Heatmap {
  Eigen::MatrixXd values;  // grid rows x grid cols
  Gesture gesture = Gesture::Rest;
  DatasetTag tag = DatasetTag::Initial;
};

/// Per-electrode mean of the RMS rows labeled `gesture`, laid out on the
/// grid. `rms` columns are the accepted channels of `mask`; rejected
/// electrodes read 0. Throws DataError if the gesture has no windows.
Heatmap mean_rms_heatmap(const Eigen::MatrixXd& rms, std::span<const int> labels, Gesture gesture,
                         const dsp::ChannelMask& mask, const dsp::ElectrodeArray& grid = {},
                         DatasetTag tag = DatasetTag::Initial);

enum class Metric { Euclidean, Cosine };
std::string_view metric_name(Metric m);

/// 20 x 20: rows/cols 0..9 are dataset A's gestures, 10..19 dataset B's.
struct PairwiseMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
  Metric metric = Metric::Euclidean;
};

/// Each electrode is z-scored over the pooled windows of both datasets, the
/// per-gesture mean vectors are formed, and every pair is compared. Both
/// inputs must have the same columns and contain every gesture.
PairwiseMatrix pairwise_matrix(const Eigen::MatrixXd& rms_a, std::span<const int> labels_a,
                               const Eigen::MatrixXd& rms_b, std::span<const int> labels_b, Metric metric);

double euclidean_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Header row of labels, then one labeled row per matrix row.
std::string matrix_to_csv(const PairwiseMatrix& m);
/// Header "row,c0,c1,...", one line per grid row.
std::string heatmap_to_csv(const Heatmap& h);

}  // namespace emg::analysis
