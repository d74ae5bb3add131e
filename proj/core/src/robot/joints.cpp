#include "emg/robot/joints.hpp"

namespace emg::robot {

namespace {
constexpr std::array<std::string_view, kJointCount> kWireNames = {
    "base_translate", "base_rotate", "lift", "arm_extend", "wrist_yaw", "wrist_pitch", "wrist_roll", "gripper",
};
}

std::string_view joint_wire_name(Joint j) { return kWireNames[joint_index(j)]; }

std::optional<Joint> joint_from_wire_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kWireNames[i] == name) return kAllJoints[i];
  }
  return std::nullopt;
}

std::string_view kind_wire_name(CommandKind k) { return k == CommandKind::Velocity ? "vel" : "dpos"; }

std::optional<CommandKind> kind_from_wire_name(std::string_view name) {
  if (name == "vel") return CommandKind::Velocity;
  if (name == "dpos") return CommandKind::PositionDelta;
  return std::nullopt;
}

}  // namespace emg::robot
