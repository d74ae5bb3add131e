#include "emg/robot/robot_sim.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"

namespace emg::robot {

using nlohmann::json;

bool RobotState::any_limit() const {
  return std::any_of(at_limit.begin(), at_limit.end(), [](bool b) { return b; });
}

std::string robot_state_to_json(const RobotState& s) {
  json joints = json::object();
  for (Joint j : kAllJoints) {
    const std::size_t i = joint_index(j);
    json e = {{"position", s.position[i]}, {"velocity", s.velocity[i]}, {"at_limit", s.at_limit[i]}};
    if (kind_of(j) == CommandKind::Velocity) {
      e["setpoint"] = s.setpoint[i];
    } else {
      e["target"] = s.target[i];
    }
    joints[std::string(joint_wire_name(j))] = std::move(e);
  }
  json doc = {{"tick", s.tick},
              {"time_s", s.time_s},
              {"mode", mode_wire_tag(s.mode)},
              {"base", {{"x", s.base.x}, {"y", s.base.y}, {"heading", s.base.heading}}},
              {"joints", std::move(joints)}};
  return doc.dump();
}

RobotState robot_state_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    RobotState s;
    s.tick = doc.at("tick").get<std::uint64_t>();
    s.time_s = doc.at("time_s").get<double>();
    const auto mode = mode_from_wire_tag(doc.at("mode").get<std::string>());
    if (!mode) throw DecodeError("robot state: unknown mode");
    s.mode = *mode;
    s.base = {doc.at("base").at("x").get<double>(), doc.at("base").at("y").get<double>(),
              doc.at("base").at("heading").get<double>()};
    for (Joint j : kAllJoints) {
      const std::size_t i = joint_index(j);
      const auto& e = doc.at("joints").at(std::string(joint_wire_name(j)));
      s.position[i] = e.at("position").get<double>();
      s.velocity[i] = e.at("velocity").get<double>();
      s.at_limit[i] = e.at("at_limit").get<bool>();
      if (kind_of(j) == CommandKind::Velocity) {
        s.setpoint[i] = e.at("setpoint").get<double>();
      } else {
        s.target[i] = e.at("target").get<double>();
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("robot state: ") + e.what());
  }
}

RobotSim::RobotSim(RobotConfig config) : config_(std::move(config)), generator_(config_) { reset(); }

void RobotSim::reset() {
  state_ = RobotState{};
  for (Joint j : kAllJoints) {
    const std::size_t i = joint_index(j);
    state_.position[i] = config_.joint(j).initial;
    state_.target[i] = state_.position[i];
    pid_[i] = PidController(config_.joint(j).pid);
  }
  limit_hit_.fill(false);
  generator_.reset();
}

void RobotSim::apply(const JointCommand& cmd) {
  if (!std::isfinite(cmd.value)) throw ParameterError("non-finite joint command");
  if (cmd.kind != kind_of(cmd.joint)) throw ParameterError("command kind does not match joint");
  const std::size_t i = joint_index(cmd.joint);
  const auto& jc = config_.joint(cmd.joint);
  state_.mode = cmd.mode;
  if (cmd.kind == CommandKind::Velocity) {
    state_.setpoint[i] = std::clamp(cmd.value, -jc.max_speed, jc.max_speed);
    return;
  }
  if (cmd.is_stop()) {
    state_.target[i] = state_.position[i];
    return;
  }
  const double wanted = (cmd.joint == Joint::Gripper ? state_.position[i] : state_.target[i]) + cmd.value;
  const double clamped = std::clamp(wanted, jc.min, jc.max);
  if (clamped != wanted) limit_hit_[i] = true;
  state_.target[i] = clamped;
  if (cmd.joint == Joint::Gripper) state_.position[i] = clamped;
}

void RobotSim::advance(double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const double h = dt / config_.substeps;
  auto& pos = state_.position;
  auto& vel = state_.velocity;
  const std::size_t tr = joint_index(Joint::BaseTranslate);
  const std::size_t rot = joint_index(Joint::BaseRotate);
  for (int s = 0; s < config_.substeps; ++s) {
    for (Joint j : kAllJoints) {
      const std::size_t i = joint_index(j);
      if (j == Joint::Gripper) continue;
      if (kind_of(j) == CommandKind::Velocity) {
        // Holding still is proportional only, so no integral tail survives a stop.
        if (state_.setpoint[i] == 0.0) pid_[i].reset();
        vel[i] += pid_[i].update(state_.setpoint[i] - vel[i], h) * h;
      } else {
        const double limit = config_.joint(j).max_speed;
        vel[i] = std::clamp(pid_[i].update(state_.target[i] - pos[i], h), -limit, limit);
      }
    }
    // Semi-implicit: positions use the freshly updated velocities.
    state_.base.heading += vel[rot] * h;
    pos[rot] = state_.base.heading;
    state_.base.x += vel[tr] * std::cos(state_.base.heading) * h;
    state_.base.y += vel[tr] * std::sin(state_.base.heading) * h;
    pos[tr] += vel[tr] * h;
    for (Joint j : {Joint::Lift, Joint::ArmExtend, Joint::WristYaw, Joint::WristPitch, Joint::WristRoll}) {
      const std::size_t i = joint_index(j);
      pos[i] += vel[i] * h;
      clamp_joint(i);
    }
  }
  state_.at_limit = limit_hit_;
  limit_hit_.fill(false);
  ++state_.tick;
  state_.time_s += dt;
}

void RobotSim::clamp_joint(std::size_t i) {
  const auto& jc = config_.joints[i];
  const double q = state_.position[i];
  if (q >= jc.min && q <= jc.max) return;
  state_.position[i] = std::clamp(q, jc.min, jc.max);
  state_.velocity[i] = 0.0;
  pid_[i].reset();
  limit_hit_[i] = true;
}

std::vector<JointCommand> RobotSim::step(const decode::DecodedGesture& decoded, Mode mode, double dt) {
  auto cmds = generator_.generate(decoded, mode);
  for (const auto& c : cmds) apply(c);
  state_.mode = mode;
  advance(dt);
  return cmds;
}

}  // namespace emg::robot
