#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emg/decode/decoder.hpp"
#include "emg/robot/command.hpp"
#include "emg/robot/config.hpp"
#include "emg/robot/pid.hpp"

namespace emg::robot {

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Immutable snapshot of the simulated manipulator. position[] holds joint
/// coordinates: odometer distance for BaseTranslate, heading for
/// BaseRotate, metres/radians for the rest, aperture for the gripper.
struct RobotState {
  BasePose base;
  std::array<double, kJointCount> position{};
  std::array<double, kJointCount> velocity{};
  std::array<double, kJointCount> setpoint{};  // velocity joints: commanded velocity
  std::array<double, kJointCount> target{};    // position joints: servo target
  std::array<bool, kJointCount> at_limit{};
  Mode mode = Mode::WristGripper;
  std::uint64_t tick = 0;
  double time_s = 0.0;

  double lift() const { return position[joint_index(Joint::Lift)]; }
  double arm_extension() const { return position[joint_index(Joint::ArmExtend)]; }
  double gripper() const { return position[joint_index(Joint::Gripper)]; }
  bool any_limit() const;
};

std::string robot_state_to_json(const RobotState& state);
RobotState robot_state_from_json(const std::string& text);

/// Kinematic joint models tracked by PID, integrated with semi-implicit
/// Euler over `substeps` per tick; differential-drive base.
class RobotSim {
 public:
  explicit RobotSim(RobotConfig config = default_robot_config());

  /// Sets the joint's setpoint (velocity) or moves its target (position).
  /// A position-delta stop freezes the target at the current position.
  void apply(const JointCommand& cmd);
  /// Integrates `dt` seconds; ends one tick.
  void advance(double dt);
  /// generate -> apply -> advance. Returns the commands issued.
  std::vector<JointCommand> step(const decode::DecodedGesture& decoded, Mode mode, double dt);
  std::vector<JointCommand> step(const decode::DecodedGesture& decoded, Mode mode) {
    return step(decoded, mode, config_.tick_dt());
  }

  const RobotState& state() const { return state_; }
  const RobotConfig& config() const { return config_; }
  void reset();

 private:
  void clamp_joint(std::size_t j);

  RobotConfig config_;
  RobotState state_;
  std::array<PidController, kJointCount> pid_;
  std::array<bool, kJointCount> limit_hit_{};
  CommandGenerator generator_;
};

}  // namespace emg::robot
