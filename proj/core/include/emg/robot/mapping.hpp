#pragma once

#include <optional>

#include "emg/gesture.hpp"
#include "emg/robot/joints.hpp"

namespace emg::robot {

inline constexpr int kDefaultRampCap = 50;

struct JointDirection {
  Joint joint;
  int sign;  // +1 or -1
  friend bool operator==(const JointDirection&, const JointDirection&) = default;
};

/// Gesture -> joint and direction under a control mode. Rest and Pinch
/// Fingers map to nothing.
///
/// Signs: gripper + opens; lift + raises; arm + extends; base translate +
/// drives forward; base rotate + turns counterclockwise; wrist yaw + turns
/// left; wrist pitch + tilts up; wrist roll + rolls palm-up.
std::optional<JointDirection> map_gesture(Mode mode, Gesture gesture);

/// a * min(x, k)^1.5.
double ramp_magnitude(double a, int x, int k = kDefaultRampCap);

}  // namespace emg::robot
