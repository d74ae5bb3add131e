#include "emg/decode/confidence.hpp"

#include <array>
#include <cmath>

#include "emg/error.hpp"

namespace emg::decode {

Gesture majority_vote(std::span<const Gesture> buffer, std::size_t m) {
  std::array<std::size_t, kGestureCount> counts{};
  for (Gesture g : buffer) {
    if (2 * ++counts[index_of(g)] > m) return g;
  }
  return Gesture::Rest;
}

Gesture threshold_label(const Eigen::VectorXd& p_prime, double r) {
  Eigen::Index best = 0;
  const double top = p_prime.maxCoeff(&best);
  return top > r ? kAllGestures[static_cast<std::size_t>(best)] : Gesture::Rest;
}

void check_probabilities(const Eigen::VectorXd& p) {
  if (p.size() != static_cast<Eigen::Index>(kGestureCount)) {
    throw ParameterError("probability vector must have 10 entries, got " + std::to_string(p.size()));
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) throw ParameterError("probability vector has an invalid entry");
  }
  if (std::abs(p.sum() - 1.0) > 1e-6) throw ParameterError("probability vector does not sum to 1");
}

ConfidenceState::ConfidenceState(const DecoderConfig& config)
    : alpha_(config.alpha), threshold_(config.threshold), m_(config.vote_length) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw ParameterError("alpha must be in (0, 1]");
  if (m_ < 1) throw ParameterError("vote buffer length must be positive");
  reset();
}

void ConfidenceState::reset() {
  p_prime_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(kGestureCount), 1.0 / kGestureCount);
  buffer_.clear();
}

const Eigen::VectorXd& ConfidenceState::update(const Eigen::VectorXd& p) {
  check_probabilities(p);
  p_prime_ = (1.0 - alpha_) * p_prime_ + alpha_ * p;
  return p_prime_;
}

Gesture ConfidenceState::threshold_and_vote(const Eigen::VectorXd& p_prime) {
  buffer_.push_back(threshold_label(p_prime, threshold_));
  while (buffer_.size() > m_) buffer_.pop_front();
  std::array<Gesture, 64> tmp{};
  std::size_t n = 0;
  for (Gesture g : buffer_) tmp[n++] = g;
  return majority_vote(std::span<const Gesture>(tmp.data(), n), m_);
}

void ConfidenceState::set(const Eigen::VectorXd& p_prime, std::span<const Gesture> buffer) {
  if (p_prime.size() != static_cast<Eigen::Index>(kGestureCount)) throw ParameterError("p' must have 10 entries");
  if (buffer.size() > m_) throw ParameterError("buffer longer than vote length");
  p_prime_ = p_prime;
  buffer_.assign(buffer.begin(), buffer.end());
}

}  // namespace emg::decode
