#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace emg::model {

using Rng = std::mt19937_64;

/// y = x W + b, with W stored inputs x outputs.
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weights == b.weights && a.bias == b.bias;
  }
};

/// Same shapes as the network's layers.
struct Gradients {
  std::vector<DenseLayer> layers;
};

/// Multiplicative inverted-dropout masks, one samples x width matrix per
/// hidden layer; entries are 0 or 1 / (1 - rate).
struct DropoutMasks {
  std::vector<Eigen::MatrixXd> hidden;
};

/// Feedforward classifier: ReLU hidden layers, each followed by dropout
/// during training, and a linear logit layer.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<DenseLayer> layers, double dropout_rate);

  /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
  static Mlp create(int inputs, const std::vector<int>& hidden, int outputs, double dropout_rate, std::uint64_t seed);

  int input_dim() const;
  int output_dim() const;
  double dropout_rate() const { return dropout_rate_; }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Inference forward pass: no dropout, deterministic.
  Eigen::VectorXd forward(const Eigen::VectorXd& features) const;
  /// training = true draws fresh dropout masks from `rng`.
  Eigen::VectorXd forward(const Eigen::VectorXd& features, bool training, Rng& rng) const;
  /// Rows are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& features, const DropoutMasks* masks = nullptr) const;

  DropoutMasks sample_dropout(Eigen::Index batch, Rng& rng) const;

  /// Mean cross-entropy over the batch; fills `grads` with its gradient.
  double loss_and_gradients(const Eigen::MatrixXd& features, std::span<const int> labels, const DropoutMasks* masks,
                            Gradients& grads) const;
  /// Mean cross-entropy without dropout.
  double loss(const Eigen::MatrixXd& features, std::span<const int> labels) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<DenseLayer> layers_;
  double dropout_rate_ = 0.0;
};

}  // namespace emg::model
