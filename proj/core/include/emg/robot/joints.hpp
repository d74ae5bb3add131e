#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace emg::robot {

inline constexpr std::size_t kJointCount = 8;

enum class Joint : std::uint8_t {
  BaseTranslate = 0,
  BaseRotate,
  Lift,
  ArmExtend,
  WristYaw,
  WristPitch,
  WristRoll,
  Gripper,
};

inline constexpr std::array<Joint, kJointCount> kAllJoints = {
    Joint::BaseTranslate, Joint::BaseRotate, Joint::Lift,      Joint::ArmExtend,
    Joint::WristYaw,      Joint::WristPitch, Joint::WristRoll, Joint::Gripper,
};

enum class CommandKind : std::uint8_t { Velocity, PositionDelta };

constexpr std::size_t joint_index(Joint j) { return static_cast<std::size_t>(j); }

/// Base, lift and arm take velocities; wrist and gripper take position deltas.
constexpr CommandKind kind_of(Joint j) {
  return joint_index(j) <= joint_index(Joint::ArmExtend) ? CommandKind::Velocity : CommandKind::PositionDelta;
}

std::string_view joint_wire_name(Joint j);  // "base_translate", ...
std::optional<Joint> joint_from_wire_name(std::string_view name);
std::string_view kind_wire_name(CommandKind k);  // "vel" / "dpos"
std::optional<CommandKind> kind_from_wire_name(std::string_view name);

}  // namespace emg::robot
