#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <string>

#include "emg/robot/joints.hpp"
#include "emg/robot/mapping.hpp"
#include "emg/robot/pid.hpp"

namespace emg::robot {

struct JointConfig {
  double min = -std::numeric_limits<double>::infinity();  // the base is unbounded
  double max = std::numeric_limits<double>::infinity();
  double initial = 0.0;
  double max_speed = 1.0;    // velocity limit, joint units per second
  double ramp_scale = 0.0;   // a
  PidGains pid;              // velocity loop (velocity joints) or position servo
};

struct RobotConfig {
  std::array<JointConfig, kJointCount> joints;
  int ramp_cap = kDefaultRampCap;
  double gripper_step = 0.05;   // aperture change per tick
  double tick_rate_hz = 6.0;
  int substeps = 10;

  const JointConfig& joint(Joint j) const { return joints[joint_index(j)]; }
  JointConfig& joint(Joint j) { return joints[joint_index(j)]; }
  double tick_dt() const { return 1.0 / tick_rate_hz; }
};

/// Stretch-like limits, ramp scales reaching each joint's top speed at the
/// cap, and the shipped PID gains.
RobotConfig default_robot_config();

std::string robot_config_to_json(const RobotConfig& config);
/// Missing keys keep their defaults.
RobotConfig robot_config_from_json(const std::string& text);
RobotConfig load_robot_config(const std::filesystem::path& path);

}  // namespace emg::robot
