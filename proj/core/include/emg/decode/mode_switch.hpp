#pragma once

#include <optional>

#include "emg/gesture.hpp"

namespace emg::decode {

struct ModeEvent {
  Mode from;
  Mode to;
};

/// Toggles the control mode after a sustained Pinch Fingers output.
class ModeSwitch {
 public:
  /// hold_ticks = ceil(hold_s * rate), cooldown_ticks = round(cooldown_s * rate).
  ModeSwitch(double tick_rate_hz = 6.0, double hold_s = 3.0, double cooldown_s = 2.0,
             Mode initial = Mode::WristGripper);

  /// One decoder output. During cooldown the hold counter stays at zero.
  std::optional<ModeEvent> update(Gesture decoded);

  Mode mode() const { return mode_; }
  int pinch_hold_ticks() const { return hold_; }
  int cooldown_remaining_ticks() const { return cooldown_; }
  int hold_requirement() const { return hold_required_; }
  int cooldown_ticks() const { return cooldown_ticks_; }

  void set_mode(Mode m) { mode_ = m; }
  void reset(Mode initial = Mode::WristGripper);

 private:
  int hold_required_;
  int cooldown_ticks_;
  Mode mode_;
  int hold_ = 0;
  int cooldown_ = 0;
};

}  // namespace emg::decode
