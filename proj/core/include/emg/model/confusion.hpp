#pragma once

#include <array>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "emg/gesture.hpp"
#include "emg/model/mlp.hpp"

namespace emg::model {

/// counts[true][predicted].
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kGestureCount>, kGestureCount> counts{};

  void add(int truth, int predicted);
  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;
  std::size_t row_total(int truth) const;
  /// Fraction of class `truth` predicted correctly; NaN when the class is absent.
  double recall(int truth) const;
};

/// Argmax-of-softmax predictions for each row of `features`.
ConfusionMatrix evaluate(const Mlp& model, const Eigen::MatrixXd& features, std::span<const int> labels);

int predict(const Mlp& model, const Eigen::VectorXd& features);

}  // namespace emg::model
