#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include <Eigen/Dense>

#include "emg/gesture.hpp"

namespace emg::decode {

struct DecoderConfig {
  double alpha = 0.5;        // weight of the newest probability vector
  double threshold = 0.5;    // r
  std::size_t vote_length = 3;  // m
  double tick_rate_hz = 6.0;
  double mode_hold_s = 3.0;
  double mode_cooldown_s = 2.0;
};

/// Label that occupies more than half of `buffer` when it holds `m` slots;
/// Rest when no label does.
Gesture majority_vote(std::span<const Gesture> buffer, std::size_t m);

/// argmax of p' if its value exceeds r, else Rest. Ties go to the lower index.
Gesture threshold_label(const Eigen::VectorXd& p_prime, double r);

/// Exponentially filtered probabilities and the vote buffer.
class ConfidenceState {
 public:
  explicit ConfidenceState(const DecoderConfig& config = {});

  const Eigen::VectorXd& p_prime() const { return p_prime_; }
  const std::deque<Gesture>& buffer() const { return buffer_; }
  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }
  std::size_t vote_length() const { return m_; }

  /// p' <- (1 - alpha) p' + alpha p. Throws ParameterError unless p is a
  /// probability vector of length 10 (state untouched).
  const Eigen::VectorXd& update(const Eigen::VectorXd& p);

  /// Appends threshold_label(p') to the buffer and returns the majority vote.
  Gesture threshold_and_vote(const Eigen::VectorXd& p_prime);

  /// Test hook: overwrite p' and the buffer (oldest first).
  void set(const Eigen::VectorXd& p_prime, std::span<const Gesture> buffer);
  void reset();

 private:
  double alpha_;
  double threshold_;
  std::size_t m_;
  Eigen::VectorXd p_prime_;
  std::deque<Gesture> buffer_;
};

/// Throws ParameterError if `p` is not a finite, nonnegative, length-10
/// vector summing to 1 within 1e-6.
void check_probabilities(const Eigen::VectorXd& p);

}  // namespace emg::decode
