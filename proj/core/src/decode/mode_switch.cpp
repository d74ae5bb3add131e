#include "emg/decode/mode_switch.hpp"

#include <cmath>

#include "emg/error.hpp"

namespace emg::decode {

ModeSwitch::ModeSwitch(double tick_rate_hz, double hold_s, double cooldown_s, Mode initial) : mode_(initial) {
  if (!(tick_rate_hz > 0.0)) throw ParameterError("tick rate must be positive");
  if (hold_s < 0.0 || cooldown_s < 0.0) throw ParameterError("hold and cooldown must be nonnegative");
  // 1e-9 keeps 3.0 * 6 from rounding up to 19
  hold_required_ = std::max(1, static_cast<int>(std::ceil(hold_s * tick_rate_hz - 1e-9)));
  cooldown_ticks_ = static_cast<int>(std::lround(cooldown_s * tick_rate_hz));
}

void ModeSwitch::reset(Mode initial) {
  mode_ = initial;
  hold_ = 0;
  cooldown_ = 0;
}

std::optional<ModeEvent> ModeSwitch::update(Gesture decoded) {
  if (cooldown_ > 0) {
    --cooldown_;
    hold_ = 0;
    return std::nullopt;
  }
  if (decoded != Gesture::PinchFingers) {
    hold_ = 0;
    return std::nullopt;
  }
  if (++hold_ < hold_required_) return std::nullopt;
  const ModeEvent ev{mode_, toggled(mode_)};
  mode_ = ev.to;
  hold_ = 0;
  cooldown_ = cooldown_ticks_;
  return ev;
}

}  // namespace emg::decode
