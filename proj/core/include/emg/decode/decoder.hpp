#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "emg/decode/confidence.hpp"
#include "emg/decode/mode_switch.hpp"
#include "emg/gesture.hpp"
#include "emg/model/bundle.hpp"

namespace emg::decode {

struct DecodedGesture {
  Gesture label = Gesture::Rest;
  std::uint64_t tick_index = 0;
  int consecutive_count = 1;
};

/// Everything one decoder tick produced.
struct DecodeTick {
  DecodedGesture decoded;
  Gesture predicted = Gesture::Rest;  // argmax of this tick's probabilities
  Eigen::VectorXd probabilities;      // classifier output (or injected one-hot)
  Eigen::VectorXd confidence;         // p' after this tick
  Mode mode = Mode::WristGripper;     // mode after this tick
  std::optional<ModeEvent> mode_event;
  bool injected = false;
};

/// Per-tick state machine: classifier -> vote on the carried confidence ->
/// confidence update -> consecutive count -> mode switch.
///
/// The vote of tick t reads the confidence accumulated through tick t-1;
/// the tick's own probabilities enter p' afterwards. A gesture that starts
/// at tick 1 of a stream is therefore first emitted at tick 3.
class Decoder {
 public:
  explicit Decoder(DecoderConfig config = {});
  Decoder(std::shared_ptr<const model::ModelBundle> bundle, DecoderConfig config = {});

  const DecoderConfig& config() const { return config_; }
  bool has_bundle() const { return bundle_ != nullptr; }
  const model::ModelBundle* bundle() const { return bundle_.get(); }
  void set_bundle(std::shared_ptr<const model::ModelBundle> bundle);

  /// Window of filtered samples, N x M (accepted channels). Errors leave the
  /// decoder untouched.
  DecodeTick step_window(const Eigen::MatrixXd& window);
  /// RMS of the accepted channels.
  DecodeTick step_rms(const Eigen::VectorXd& rms);
  /// Bypasses the classifier.
  DecodeTick step_probabilities(const Eigen::VectorXd& p, bool injected = false);

  /// The next step uses a one-hot vector for `g` instead of its input.
  void inject(Gesture g) { pending_injection_ = g; }
  std::optional<Gesture> pending_injection() const { return pending_injection_; }

  const ConfidenceState& confidence() const { return confidence_; }
  const ModeSwitch& mode_switch() const { return mode_switch_; }
  Mode mode() const { return mode_switch_.mode(); }
  std::uint64_t ticks() const { return tick_; }
  std::optional<DecodedGesture> last() const { return last_; }

  void reset();
  /// Test hook: start from a given confidence vector and vote buffer.
  void set_confidence(const Eigen::VectorXd& p_prime, std::span<const Gesture> buffer) {
    confidence_.set(p_prime, buffer);
  }

 private:
  Eigen::VectorXd classify(const Eigen::VectorXd& rms) const;

  DecoderConfig config_;
  std::shared_ptr<const model::ModelBundle> bundle_;
  ConfidenceState confidence_;
  ModeSwitch mode_switch_;
  std::uint64_t tick_ = 0;
  std::optional<DecodedGesture> last_;
  std::optional<Gesture> pending_injection_;
};

Eigen::VectorXd one_hot(Gesture g);

}  // namespace emg::decode
