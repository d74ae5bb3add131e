#include "emg/model/confusion.hpp"

#include <limits>

#include "emg/error.hpp"

namespace emg::model {

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || truth >= static_cast<int>(kGestureCount) || predicted < 0 ||
      predicted >= static_cast<int>(kGestureCount)) {
    throw ParameterError("class id out of range");
  }
  ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t v : row) n += v;
  }
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < kGestureCount; ++i) n += counts[i][i];
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

std::size_t ConfusionMatrix::row_total(int truth) const {
  std::size_t n = 0;
  for (std::size_t v : counts[static_cast<std::size_t>(truth)]) n += v;
  return n;
}

double ConfusionMatrix::recall(int truth) const {
  const std::size_t n = row_total(truth);
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(truth)]) /
         static_cast<double>(n);
}

int predict(const Mlp& model, const Eigen::VectorXd& features) {
  Eigen::Index arg = 0;
  model.forward(features).maxCoeff(&arg);
  return static_cast<int>(arg);
}

ConfusionMatrix evaluate(const Mlp& model, const Eigen::MatrixXd& features, std::span<const int> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) throw DataError("feature/label count mismatch");
  if (labels.empty()) throw DataError("empty test set");
  ConfusionMatrix cm;
  const Eigen::MatrixXd logits = model.forward_batch(features);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    cm.add(labels[static_cast<std::size_t>(i)], static_cast<int>(arg));
  }
  return cm;
}

}  // namespace emg::model
