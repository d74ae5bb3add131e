#include "emg/model/loss.hpp"

#include <cmath>

#include "emg/error.hpp"

namespace emg::model {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double shift = logits.maxCoeff();
  const double lse = std::log((logits.array() - shift).exp().sum()) + shift;
  return (logits.array() - lse).matrix();
}

double cross_entropy(const Eigen::VectorXd& logits, int true_class) {
  if (true_class < 0 || true_class >= logits.size()) throw ParameterError("class id out of range");
  return -log_softmax(logits)[true_class];
}

Eigen::VectorXd cross_entropy_gradient(const Eigen::VectorXd& logits, int true_class) {
  if (true_class < 0 || true_class >= logits.size()) throw ParameterError("class id out of range");
  Eigen::VectorXd g = softmax(logits);
  g[true_class] -= 1.0;
  return g;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Eigen::ArrayXd row = logits.row(i).transpose().array();
    const Eigen::ArrayXd e = (row - row.maxCoeff()).exp();
    out.row(i) = (e / e.sum()).matrix().transpose();
  }
  return out;
}

}  // namespace emg::model
