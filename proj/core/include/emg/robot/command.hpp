#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "emg/decode/decoder.hpp"
#include "emg/gesture.hpp"
#include "emg/robot/config.hpp"
#include "emg/robot/joints.hpp"

namespace emg::robot {

/// One joint's command for one tick. Velocity commands carry a signed
/// setpoint, position-delta commands a signed increment; 0 means stop.
struct JointCommand {
  Joint joint = Joint::Lift;
  CommandKind kind = CommandKind::Velocity;
  double value = 0.0;
  Mode mode = Mode::WristGripper;

  double magnitude() const { return std::abs(value); }
  int sign() const { return std::signbit(value) ? -1 : 1; }
  bool is_stop() const { return value == 0.0; }

  /// Bitwise on the value, so -0.0 != 0.0.
  friend bool operator==(const JointCommand& a, const JointCommand& b);
};

JointCommand make_command(Joint joint, double value, Mode mode);
JointCommand stop_command(Joint joint, Mode mode);

/// Turns decoder output into joint commands: map, ramp by the consecutive
/// count, and stop the previously commanded joint when it changes.
class CommandGenerator {
 public:
  explicit CommandGenerator(RobotConfig config = default_robot_config());

  /// Stop (if any) comes first, then the new command (if any).
  std::vector<JointCommand> generate(const decode::DecodedGesture& decoded, Mode mode);

  std::optional<Joint> active_joint() const { return active_; }
  void reset() { active_.reset(); }

 private:
  RobotConfig config_;
  std::optional<Joint> active_;
  Mode active_mode_ = Mode::WristGripper;
};

}  // namespace emg::robot
