#include "emg/decode/decoder.hpp"

#include "emg/dsp/features.hpp"
#include "emg/error.hpp"
#include "emg/model/loss.hpp"

namespace emg::decode {

Eigen::VectorXd one_hot(Gesture g) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kGestureCount));
  p[static_cast<Eigen::Index>(index_of(g))] = 1.0;
  return p;
}

Decoder::Decoder(DecoderConfig config)
    : config_(config),
      confidence_(config),
      mode_switch_(config.tick_rate_hz, config.mode_hold_s, config.mode_cooldown_s) {}

Decoder::Decoder(std::shared_ptr<const model::ModelBundle> bundle, DecoderConfig config) : Decoder(config) {
  set_bundle(std::move(bundle));
}

void Decoder::set_bundle(std::shared_ptr<const model::ModelBundle> bundle) { bundle_ = std::move(bundle); }

void Decoder::reset() {
  confidence_.reset();
  mode_switch_.reset();
  tick_ = 0;
  last_.reset();
  pending_injection_.reset();
}

Eigen::VectorXd Decoder::classify(const Eigen::VectorXd& rms) const {
  if (!bundle_) throw Error("decoder has no model bundle");
  const auto& p = bundle_->pipeline;
  if (rms.size() != static_cast<Eigen::Index>(p.accepted_channels())) {
    throw DataError("window has " + std::to_string(rms.size()) + " channels, bundle expects " +
                    std::to_string(p.accepted_channels()));
  }
  if (!rms.allFinite()) throw DataError("non-finite RMS value");
  return model::softmax(bundle_->network.forward(p.features_from_rms(rms)));
}

DecodeTick Decoder::step_window(const Eigen::MatrixXd& window) {
  if (bundle_ && window.rows() != bundle_->pipeline.window_samples) {
    throw DataError("window has " + std::to_string(window.rows()) + " samples, expected " +
                    std::to_string(bundle_->pipeline.window_samples));
  }
  if (!window.allFinite()) throw DataError("non-finite sample in window");
  return step_rms(dsp::window_rms(window));
}

DecodeTick Decoder::step_rms(const Eigen::VectorXd& rms) {
  if (pending_injection_) return step_probabilities(one_hot(*pending_injection_), true);
  return step_probabilities(classify(rms), false);
}

DecodeTick Decoder::step_probabilities(const Eigen::VectorXd& input, bool injected) {
  Eigen::VectorXd p = input;
  if (pending_injection_) {
    p = one_hot(*pending_injection_);
    injected = true;
  }
  check_probabilities(p);
  pending_injection_.reset();

  DecodeTick out;
  const Gesture label = confidence_.threshold_and_vote(confidence_.p_prime());
  out.confidence = confidence_.update(p);
  out.probabilities = std::move(p);
  Eigen::Index best = 0;
  out.probabilities.maxCoeff(&best);
  out.predicted = kAllGestures[static_cast<std::size_t>(best)];
  out.injected = injected;

  ++tick_;
  DecodedGesture d{label, tick_, 1};
  if (last_ && last_->label == label) d.consecutive_count = last_->consecutive_count + 1;
  last_ = d;
  out.decoded = d;
  out.mode_event = mode_switch_.update(label);
  out.mode = mode_switch_.mode();
  return out;
}

}  // namespace emg::decode
