#include "emg/model/adam.hpp"

#include <cmath>

#include "emg/error.hpp"

namespace emg::model {

namespace {
std::vector<DenseLayer> zeros_like(const Mlp& model) {
  std::vector<DenseLayer> out;
  for (const auto& l : model.layers()) {
    out.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

template <typename Param, typename Moment>
void update(Param& p, Moment& m, Moment& v, const Moment& g, const AdamConfig& c, double bc1, double bc2) {
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
  p.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
}
}  // namespace

Adam::Adam(const Mlp& model, AdamConfig config) : config_(config), m_(zeros_like(model)), v_(zeros_like(model)) {}

void Adam::step(Mlp& model, const Gradients& grads) {
  auto& layers = model.layers();
  if (grads.layers.size() != layers.size() || m_.size() != layers.size()) {
    throw ParameterError("gradient shape does not match model");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, m_[l].weights, v_[l].weights, grads.layers[l].weights, config_, bc1, bc2);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grads.layers[l].bias, config_, bc1, bc2);
  }
}

}  // namespace emg::model
