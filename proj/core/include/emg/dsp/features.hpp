#pragma once

#include <Eigen/Dense>

namespace emg::dsp {

inline constexpr int kDefaultWindowSamples = 1000;
inline constexpr int kDefaultPcaComponents = 30;
inline constexpr double kSigmaFloor = 1e-12;

/// Root-mean-square of each column of an N x M window (rows are samples).
Eigen::VectorXd window_rms(const Eigen::MatrixXd& window);

/// Per-channel z-score parameters, fit on training RMS windows.
struct Normalizer {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;

  Eigen::VectorXd apply(const Eigen::VectorXd& rms) const;
};

/// Rows of `training_rms` are RMS vectors. Population standard deviation,
/// floored at kSigmaFloor so dead channels normalize to zero.
Normalizer fit_normalizer(const Eigen::MatrixXd& training_rms);
Eigen::VectorXd normalize(const Normalizer& norm, const Eigen::VectorXd& rms);

/// Leading left-singular vectors of the (uncentered) z-score matrix.
struct PcaBasis {
  Eigen::MatrixXd components;        // M x K, orthonormal columns
  Eigen::VectorXd singular_values;   // all min(M, samples) values, descending

  Eigen::Index input_dim() const { return components.rows(); }
  Eigen::Index output_dim() const { return components.cols(); }
  /// Fraction of squared singular mass captured by each retained component.
  Eigen::VectorXd explained_variance_ratio() const;
};

/// `z_matrix` is channels x samples. Component signs are fixed so each
/// column's largest-magnitude entry is positive.
PcaBasis fit_pca(const Eigen::MatrixXd& z_matrix, int components);
Eigen::VectorXd pca_project(const PcaBasis& basis, const Eigen::VectorXd& z);

}  // namespace emg::dsp
