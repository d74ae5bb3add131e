#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "emg/model/adam.hpp"
#include "emg/model/confusion.hpp"
#include "emg/model/mlp.hpp"

namespace emg::model {

struct SplitFractions {
  double train = 0.64;
  double validation = 0.16;
  double test = 0.20;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  SplitFractions split;
  AdamConfig adam;
  std::vector<int> hidden = {512, 512};
  double dropout = 0.2;
  std::uint64_t seed = 0;
};

/// Row indices into a dataset.
struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Per class (shuffled with `seed`): floor(test * n_c) to test,
/// floor(validation * n_c) to validation, the remainder to train.
DataSplit stratified_split(std::span<const int> labels, const SplitFractions& fractions, std::uint64_t seed);

struct TrainingHistory {
  std::vector<double> train_loss;       // mean batch loss, dropout active
  std::vector<double> validation_loss;  // inference mode, end of epoch
  int best_epoch = -1;                  // 0-based

  double best_validation_loss() const;
};

struct TrainedNetwork {
  Mlp model;
  TrainingHistory history;
};

/// Adam on mini-batch cross-entropy; returns the parameters of the epoch with
/// the lowest validation loss.
TrainedNetwork train_network(const Eigen::MatrixXd& train_x, std::span<const int> train_y,
                             const Eigen::MatrixXd& val_x, std::span<const int> val_y, const TrainConfig& config);

struct TrainResult {
  Mlp model;
  TrainingHistory history;
  DataSplit split;
  ConfusionMatrix test;
};

/// Split + train + test on already-transformed feature vectors (rows).
/// Throws DataError if any of the 10 classes is missing from the training split.
TrainResult train(const Eigen::MatrixXd& features, std::span<const int> labels, const TrainConfig& config);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);
std::vector<int> select(std::span<const int> v, std::span<const std::size_t> rows);

}  // namespace emg::model
