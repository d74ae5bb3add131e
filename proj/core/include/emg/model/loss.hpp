#pragma once

#include <Eigen/Dense>

namespace emg::model {

/// Max-shifted softmax; invariant to adding a constant to every logit.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

/// -log softmax(logits)[true_class], computed in the log domain.
double cross_entropy(const Eigen::VectorXd& logits, int true_class);

/// d CE / d logits = softmax(logits) - onehot(true_class).
Eigen::VectorXd cross_entropy_gradient(const Eigen::VectorXd& logits, int true_class);

/// Row-wise softmax of a samples x classes matrix.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

}  // namespace emg::model
