#include "emg/model/mlp.hpp"

#include <cmath>

#include "emg/error.hpp"
#include "emg/model/loss.hpp"

namespace emg::model {

Mlp::Mlp(std::vector<DenseLayer> layers, double dropout_rate)
    : layers_(std::move(layers)), dropout_rate_(dropout_rate) {
  if (layers_.empty()) throw ParameterError("network needs at least one layer");
  if (dropout_rate_ < 0.0 || dropout_rate_ >= 1.0) throw ParameterError("dropout rate must be in [0, 1)");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weights.cols()) throw ParameterError("bias width mismatch");
    if (l > 0 && layers_[l].weights.rows() != layers_[l - 1].weights.cols()) {
      throw ParameterError("layer widths do not chain");
    }
  }
}

Mlp Mlp::create(int inputs, const std::vector<int>& hidden, int outputs, double dropout_rate, std::uint64_t seed) {
  if (inputs < 1 || outputs < 1) throw ParameterError("network dimensions must be positive");
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  int fan_in = inputs;
  auto add = [&](int width) {
    if (width < 1) throw ParameterError("layer width must be positive");
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer layer{Eigen::MatrixXd(fan_in, width), Eigen::VectorXd::Zero(width)};
    // column-major fill order keeps initialization independent of Eigen internals
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) layer.weights(i, j) = u(rng);
    }
    layers.push_back(std::move(layer));
    fan_in = width;
  };
  for (int w : hidden) add(w);
  add(outputs);
  return Mlp(std::move(layers), dropout_rate);
}

int Mlp::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.rows()); }
int Mlp::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.cols()); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& features) const {
  if (features.size() != input_dim()) throw DataError("feature dimension does not match network input");
  return forward_batch(features.transpose()).row(0).transpose();
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& features, bool training, Rng& rng) const {
  if (!training) return forward(features);
  if (features.size() != input_dim()) throw DataError("feature dimension does not match network input");
  const DropoutMasks masks = sample_dropout(1, rng);
  return forward_batch(features.transpose(), &masks).row(0).transpose();
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& features, const DropoutMasks* masks) const {
  if (features.cols() != input_dim()) throw DataError("feature dimension does not match network input");
  Eigen::MatrixXd h = features;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Eigen::MatrixXd z = h * layers_[l].weights;
    z.rowwise() += layers_[l].bias.transpose();
    h = z.cwiseMax(0.0);
    if (masks != nullptr) h = h.cwiseProduct(masks->hidden[l]);
  }
  Eigen::MatrixXd logits = h * layers_.back().weights;
  logits.rowwise() += layers_.back().bias.transpose();
  return logits;
}

DropoutMasks Mlp::sample_dropout(Eigen::Index batch, Rng& rng) const {
  DropoutMasks masks;
  const double keep_scale = 1.0 / (1.0 - dropout_rate_);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Eigen::MatrixXd m(batch, layers_[l].weights.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng) < dropout_rate_ ? 0.0 : keep_scale;
    }
    masks.hidden.push_back(std::move(m));
  }
  return masks;
}

double Mlp::loss_and_gradients(const Eigen::MatrixXd& features, std::span<const int> labels,
                               const DropoutMasks* masks, Gradients& grads) const {
  const Eigen::Index batch = features.rows();
  if (batch == 0 || static_cast<std::size_t>(batch) != labels.size()) throw DataError("batch/label size mismatch");
  if (features.cols() != input_dim()) throw DataError("feature dimension does not match network input");

  const std::size_t n_layers = layers_.size();
  std::vector<Eigen::MatrixXd> inputs(n_layers);  // input of each layer
  std::vector<Eigen::MatrixXd> pre(n_layers - 1);  // hidden pre-activations
  inputs[0] = features;
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    pre[l] = inputs[l] * layers_[l].weights;
    pre[l].rowwise() += layers_[l].bias.transpose();
    inputs[l + 1] = pre[l].cwiseMax(0.0);
    if (masks != nullptr) inputs[l + 1] = inputs[l + 1].cwiseProduct(masks->hidden[l]);
  }
  Eigen::MatrixXd logits = inputs.back() * layers_.back().weights;
  logits.rowwise() += layers_.back().bias.transpose();

  double loss = 0.0;
  Eigen::MatrixXd delta = softmax_rows(logits);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) throw ParameterError("class id out of range");
    loss += cross_entropy(logits.row(i).transpose(), y);
    delta(i, y) -= 1.0;
  }
  const double inv_batch = 1.0 / static_cast<double>(batch);
  delta *= inv_batch;

  grads.layers.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    grads.layers[l].weights = inputs[l].transpose() * delta;
    grads.layers[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * layers_[l].weights.transpose();
    const Eigen::MatrixXd& z = pre[l - 1];
    for (Eigen::Index j = 0; j < back.cols(); ++j) {
      for (Eigen::Index i = 0; i < back.rows(); ++i) {
        if (z(i, j) <= 0.0) back(i, j) = 0.0;
      }
    }
    if (masks != nullptr) back = back.cwiseProduct(masks->hidden[l - 1]);
    delta = std::move(back);
  }
  return loss * inv_batch;
}

double Mlp::loss(const Eigen::MatrixXd& features, std::span<const int> labels) const {
  if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.empty()) {
    throw DataError("batch/label size mismatch");
  }
  const Eigen::MatrixXd logits = forward_batch(features);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    total += cross_entropy(logits.row(i).transpose(), labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace emg::model
