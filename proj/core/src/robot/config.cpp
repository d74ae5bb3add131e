#include "emg/robot/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"

namespace emg::robot {

using nlohmann::json;

namespace {

JointConfig joint_config(double min, double max, double initial, double max_speed, double top_command,
                         PidGains pid) {
  JointConfig j;
  j.min = min;
  j.max = max;
  j.initial = initial;
  j.max_speed = max_speed;
  j.ramp_scale = top_command / std::pow(static_cast<double>(kDefaultRampCap), 1.5);
  j.pid = pid;
  return j;
}

json limit_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double limit_from(const json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

}  // namespace

RobotConfig default_robot_config() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const PidGains velocity_loop{12.0, 36.0, 0.05, 0.0};
  const PidGains servo{10.0, 0.0, 0.0, 0.0};
  auto vel = [&](double speed) {
    PidGains g = velocity_loop;
    g.integral_limit = 10.0 * speed;
    return g;
  };
  RobotConfig c;
  c.joint(Joint::BaseTranslate) = joint_config(-inf, inf, 0.0, 0.3, 0.3, vel(0.3));
  c.joint(Joint::BaseRotate) = joint_config(-inf, inf, 0.0, 0.6, 0.6, vel(0.6));
  c.joint(Joint::Lift) = joint_config(0.0, 1.1, 0.6, 0.3, 0.3, vel(0.3));
  c.joint(Joint::ArmExtend) = joint_config(0.0, 0.52, 0.1, 0.3, 0.3, vel(0.3));
  PidGains s = servo;
  s.integral_limit = 10.0;
  c.joint(Joint::WristYaw) = joint_config(-1.75, 4.0, 0.0, 2.0, 0.15, s);
  c.joint(Joint::WristPitch) = joint_config(-1.57, 0.56, 0.0, 2.0, 0.15, s);
  c.joint(Joint::WristRoll) = joint_config(-3.14, 3.14, 0.0, 2.0, 0.15, s);
  c.joint(Joint::Gripper) = joint_config(0.0, 1.0, 0.5, 1.0, 0.05, s);
  return c;
}

std::string robot_config_to_json(const RobotConfig& c) {
  json joints = json::object();
  for (Joint j : kAllJoints) {
    const auto& jc = c.joint(j);
    joints[std::string(joint_wire_name(j))] = {
        {"min", limit_json(jc.min)},
        {"max", limit_json(jc.max)},
        {"initial", jc.initial},
        {"max_speed", jc.max_speed},
        {"ramp_scale", jc.ramp_scale},
        {"pid", {{"kp", jc.pid.kp}, {"ki", jc.pid.ki}, {"kd", jc.pid.kd}, {"integral_limit", jc.pid.integral_limit}}},
    };
  }
  json doc = {{"ramp_cap", c.ramp_cap},
              {"gripper_step", c.gripper_step},
              {"tick_rate_hz", c.tick_rate_hz},
              {"substeps", c.substeps},
              {"joints", std::move(joints)}};
  return doc.dump(2);
}

RobotConfig robot_config_from_json(const std::string& text) {
  RobotConfig c = default_robot_config();
  try {
    const json doc = json::parse(text);
    c.ramp_cap = doc.value("ramp_cap", c.ramp_cap);
    c.gripper_step = doc.value("gripper_step", c.gripper_step);
    c.tick_rate_hz = doc.value("tick_rate_hz", c.tick_rate_hz);
    c.substeps = doc.value("substeps", c.substeps);
    if (doc.contains("joints")) {
      for (const auto& [name, jj] : doc.at("joints").items()) {
        const auto joint = joint_from_wire_name(name);
        if (!joint) throw ParameterError("robot config: unknown joint '" + name + "'");
        auto& jc = c.joint(*joint);
        if (jj.contains("min")) jc.min = limit_from(jj.at("min"), -std::numeric_limits<double>::infinity());
        if (jj.contains("max")) jc.max = limit_from(jj.at("max"), std::numeric_limits<double>::infinity());
        jc.initial = jj.value("initial", jc.initial);
        jc.max_speed = jj.value("max_speed", jc.max_speed);
        jc.ramp_scale = jj.value("ramp_scale", jc.ramp_scale);
        if (jj.contains("pid")) {
          const auto& p = jj.at("pid");
          jc.pid.kp = p.value("kp", jc.pid.kp);
          jc.pid.ki = p.value("ki", jc.pid.ki);
          jc.pid.kd = p.value("kd", jc.pid.kd);
          jc.pid.integral_limit = p.value("integral_limit", jc.pid.integral_limit);
        }
        if (!(jc.min <= jc.initial && jc.initial <= jc.max)) {
          throw ParameterError("robot config: initial position of " + name + " is outside its limits");
        }
      }
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("robot config: ") + e.what());
  }
  if (c.tick_rate_hz <= 0.0 || c.substeps < 1 || c.ramp_cap < 1) throw ParameterError("robot config: bad timing");
  return c;
}

RobotConfig load_robot_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("robot config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return robot_config_from_json(ss.str());
}

}  // namespace emg::robot
