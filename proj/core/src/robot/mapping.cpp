#include "emg/robot/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "emg/error.hpp"

namespace emg::robot {

std::optional<JointDirection> map_gesture(Mode mode, Gesture gesture) {
  if (mode == Mode::WristGripper) {
    switch (gesture) {
      case Gesture::FingersClosed: return JointDirection{Joint::Gripper, -1};
      case Gesture::FingersOpen: return JointDirection{Joint::Gripper, +1};
      case Gesture::WristLeft: return JointDirection{Joint::WristYaw, +1};
      case Gesture::WristRight: return JointDirection{Joint::WristYaw, -1};
      case Gesture::WristUp: return JointDirection{Joint::WristPitch, +1};
      case Gesture::WristDown: return JointDirection{Joint::WristPitch, -1};
      case Gesture::PalmDown: return JointDirection{Joint::WristRoll, -1};
      case Gesture::PalmUp: return JointDirection{Joint::WristRoll, +1};
      case Gesture::Rest:
      case Gesture::PinchFingers: return std::nullopt;
    }
  } else {
    switch (gesture) {
      case Gesture::WristUp: return JointDirection{Joint::Lift, +1};
      case Gesture::WristDown: return JointDirection{Joint::Lift, -1};
      case Gesture::FingersClosed: return JointDirection{Joint::ArmExtend, -1};
      case Gesture::FingersOpen: return JointDirection{Joint::ArmExtend, +1};
      case Gesture::WristRight: return JointDirection{Joint::BaseTranslate, +1};
      case Gesture::WristLeft: return JointDirection{Joint::BaseTranslate, -1};
      case Gesture::PalmDown: return JointDirection{Joint::BaseRotate, +1};
      case Gesture::PalmUp: return JointDirection{Joint::BaseRotate, -1};
      case Gesture::Rest:
      case Gesture::PinchFingers: return std::nullopt;
    }
  }
  return std::nullopt;
}

double ramp_magnitude(double a, int x, int k) {
  if (x < 0) throw ParameterError("ramp count must be nonnegative");
  if (k < 1) throw ParameterError("ramp cap must be at least 1");
  const double c = static_cast<double>(std::min(x, k));
  return a * c * std::sqrt(c);
}

}  // namespace emg::robot
