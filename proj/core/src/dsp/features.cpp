#include "emg/dsp/features.hpp"

#include <cmath>

#include "emg/error.hpp"

namespace emg::dsp {

Eigen::VectorXd window_rms(const Eigen::MatrixXd& window) {
  if (window.rows() == 0 || window.cols() == 0) throw DataError("empty window");
  if (!window.allFinite()) throw DataError("non-finite sample in window");
  Eigen::VectorXd out(window.cols());
  const double n = static_cast<double>(window.rows());
  for (Eigen::Index j = 0; j < window.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < window.rows(); ++i) acc += window(i, j) * window(i, j);
    out[j] = std::sqrt(acc / n);
  }
  return out;
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& rms) const { return normalize(*this, rms); }

Normalizer fit_normalizer(const Eigen::MatrixXd& training_rms) {
  if (training_rms.rows() < 2) throw DataError("normalizer needs at least 2 training vectors");
  const double n = static_cast<double>(training_rms.rows());
  Normalizer norm;
  norm.mu = training_rms.colwise().sum().transpose() / n;
  norm.sigma.resize(training_rms.cols());
  for (Eigen::Index j = 0; j < training_rms.cols(); ++j) {
    const double var = (training_rms.col(j).array() - norm.mu[j]).square().sum() / n;
    norm.sigma[j] = std::max(std::sqrt(var), kSigmaFloor);
  }
  return norm;
}

Eigen::VectorXd normalize(const Normalizer& norm, const Eigen::VectorXd& rms) {
  if (rms.size() != norm.mu.size()) throw DataError("normalize: dimension mismatch");
  return ((rms - norm.mu).array() / norm.sigma.array()).matrix();
}

Eigen::VectorXd PcaBasis::explained_variance_ratio() const {
  const double total = singular_values.squaredNorm();
  Eigen::VectorXd out(components.cols());
  for (Eigen::Index k = 0; k < components.cols(); ++k) {
    out[k] = total > 0.0 ? singular_values[k] * singular_values[k] / total : 0.0;
  }
  return out;
}

PcaBasis fit_pca(const Eigen::MatrixXd& z_matrix, int components) {
  const Eigen::Index m = z_matrix.rows();
  if (components < 1) throw ParameterError("PCA needs at least one component");
  if (components > m) throw ParameterError("PCA components exceed channel count");
  if (z_matrix.cols() < components) throw DataError("PCA needs at least K samples");
  if (!z_matrix.allFinite()) throw DataError("non-finite value in PCA input");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(z_matrix, Eigen::ComputeThinU);
  PcaBasis basis;
  basis.singular_values = svd.singularValues();
  basis.components = svd.matrixU().leftCols(components);
  for (Eigen::Index k = 0; k < basis.components.cols(); ++k) {
    Eigen::Index arg = 0;
    basis.components.col(k).cwiseAbs().maxCoeff(&arg);
    if (basis.components(arg, k) < 0.0) basis.components.col(k) *= -1.0;
  }
  return basis;
}

Eigen::VectorXd pca_project(const PcaBasis& basis, const Eigen::VectorXd& z) {
  if (z.size() != basis.components.rows()) throw DataError("pca_project: dimension mismatch");
  return basis.components.transpose() * z;
}

}  // namespace emg::dsp
