#pragma once

#include <vector>

#include "emg/model/mlp.hpp"

namespace emg::model {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over every weight and bias of an Mlp.
class Adam {
 public:
  Adam(const Mlp& model, AdamConfig config);

  void step(Mlp& model, const Gradients& grads);
  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
  long t_ = 0;
};

}  // namespace emg::model
