#include "emg/robot/command.hpp"

#include <bit>
#include <cstdint>

namespace emg::robot {

bool operator==(const JointCommand& a, const JointCommand& b) {
  return a.joint == b.joint && a.kind == b.kind && a.mode == b.mode &&
         std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
}

JointCommand make_command(Joint joint, double value, Mode mode) { return {joint, kind_of(joint), value, mode}; }

JointCommand stop_command(Joint joint, Mode mode) { return make_command(joint, 0.0, mode); }

CommandGenerator::CommandGenerator(RobotConfig config) : config_(std::move(config)) {}

std::vector<JointCommand> CommandGenerator::generate(const decode::DecodedGesture& decoded, Mode mode) {
  std::vector<JointCommand> out;
  const auto dir = map_gesture(mode, decoded.label);
  const std::optional<Joint> next = dir ? std::optional<Joint>(dir->joint) : std::nullopt;
  if (active_ && active_ != next) out.push_back(stop_command(*active_, mode));
  if (dir) {
    const double magnitude = dir->joint == Joint::Gripper
                                 ? config_.gripper_step
                                 : ramp_magnitude(config_.joint(dir->joint).ramp_scale,
                                                  std::max(decoded.consecutive_count, 0), config_.ramp_cap);
    out.push_back(make_command(dir->joint, dir->sign * magnitude, mode));
  }
  active_ = next;
  active_mode_ = mode;
  return out;
}

}  // namespace emg::robot
