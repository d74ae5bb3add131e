#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "emg/error.hpp"
#include "emg/robot/command.hpp"
#include "emg/robot/config.hpp"
#include "emg/robot/mapping.hpp"
#include "emg/robot/pid.hpp"
#include "emg/robot/robot_sim.hpp"
#include "emg/robot/sim_server.hpp"
#include "emg/robot/wire.hpp"

using namespace emg;
using namespace emg::robot;

namespace {

decode::DecodedGesture held(Gesture g, int count) { return {g, static_cast<std::uint64_t>(count), count}; }

}  // namespace

TEST(Mapping, BothModes) {
  using G = Gesture;
  struct Row {
    Mode mode;
    G gesture;
    Joint joint;
    int sign;
  };
  const Row table[] = {
      {Mode::WristGripper, G::FingersClosed, Joint::Gripper, -1},
      {Mode::WristGripper, G::FingersOpen, Joint::Gripper, +1},
      {Mode::WristGripper, G::WristLeft, Joint::WristYaw, +1},
      {Mode::WristGripper, G::WristRight, Joint::WristYaw, -1},
      {Mode::WristGripper, G::WristUp, Joint::WristPitch, +1},
      {Mode::WristGripper, G::WristDown, Joint::WristPitch, -1},
      {Mode::WristGripper, G::PalmDown, Joint::WristRoll, -1},
      {Mode::WristGripper, G::PalmUp, Joint::WristRoll, +1},
      {Mode::ArmDrive, G::WristUp, Joint::Lift, +1},
      {Mode::ArmDrive, G::WristDown, Joint::Lift, -1},
      {Mode::ArmDrive, G::FingersClosed, Joint::ArmExtend, -1},
      {Mode::ArmDrive, G::FingersOpen, Joint::ArmExtend, +1},
      {Mode::ArmDrive, G::WristRight, Joint::BaseTranslate, +1},
      {Mode::ArmDrive, G::WristLeft, Joint::BaseTranslate, -1},
      {Mode::ArmDrive, G::PalmDown, Joint::BaseRotate, +1},
      {Mode::ArmDrive, G::PalmUp, Joint::BaseRotate, -1},
  };
  for (const auto& r : table) {
    const auto d = map_gesture(r.mode, r.gesture);
    ASSERT_TRUE(d) << gesture_name(r.gesture);
    EXPECT_EQ(*d, (JointDirection{r.joint, r.sign})) << mode_name(r.mode) << " " << gesture_name(r.gesture);
  }
  for (Mode m : {Mode::WristGripper, Mode::ArmDrive}) {
    EXPECT_FALSE(map_gesture(m, G::Rest));
    EXPECT_FALSE(map_gesture(m, G::PinchFingers));
  }
}

TEST(Mapping, CommandKinds) {
  for (Joint j : {Joint::BaseTranslate, Joint::BaseRotate, Joint::Lift, Joint::ArmExtend}) {
    EXPECT_EQ(kind_of(j), CommandKind::Velocity);
  }
  for (Joint j : {Joint::WristYaw, Joint::WristPitch, Joint::WristRoll, Joint::Gripper}) {
    EXPECT_EQ(kind_of(j), CommandKind::PositionDelta);
  }
}

TEST(Ramp, PowerLawWithCap) {
  EXPECT_DOUBLE_EQ(ramp_magnitude(2.0, 0), 0.0);
  EXPECT_DOUBLE_EQ(ramp_magnitude(2.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(ramp_magnitude(2.0, 4), 16.0);
  EXPECT_DOUBLE_EQ(ramp_magnitude(1.0, 9), 27.0);
  EXPECT_DOUBLE_EQ(ramp_magnitude(1.0, 50), 50.0 * std::sqrt(50.0));
  EXPECT_DOUBLE_EQ(ramp_magnitude(1.0, 51), ramp_magnitude(1.0, 50));
  EXPECT_DOUBLE_EQ(ramp_magnitude(1.0, 16, 9), 27.0);
}

TEST(Ramp, DefaultScalesReachTopSpeedAtTheCap) {
  const auto c = default_robot_config();
  for (Joint j : {Joint::BaseTranslate, Joint::BaseRotate, Joint::Lift, Joint::ArmExtend}) {
    EXPECT_NEAR(ramp_magnitude(c.joint(j).ramp_scale, c.ramp_cap), c.joint(j).max_speed, 1e-12);
  }
}

TEST(Pid, DiscreteForm) {
  PidController pid({2.0, 10.0, 0.5, 1e9});
  // first call: no derivative
  EXPECT_DOUBLE_EQ(pid.update(1.0, 0.1), 2.0 * 1.0 + 10.0 * 0.1);
  EXPECT_DOUBLE_EQ(pid.update(0.5, 0.1), 2.0 * 0.5 + 10.0 * 0.15 + 0.5 * (0.5 - 1.0) / 0.1);
  pid.reset();
  EXPECT_EQ(pid.integral(), 0.0);
}

TEST(Pid, IntegralClamp) {
  PidController pid({0.0, 1.0, 0.0, 0.25});
  for (int i = 0; i < 10; ++i) pid.update(1.0, 0.1);
  EXPECT_DOUBLE_EQ(pid.integral(), 0.25);
  EXPECT_DOUBLE_EQ(pid.update(-10.0, 0.1), -0.25);
}

TEST(RobotSim, VelocityStepSettlesFastWithBoundedOvershoot) {
  const auto cfg = default_robot_config();
  for (Joint j : {Joint::BaseTranslate, Joint::BaseRotate, Joint::Lift, Joint::ArmExtend}) {
    RobotSim sim(cfg);
    const double v = 0.5 * cfg.joint(j).max_speed;
    sim.apply(make_command(j, v, Mode::ArmDrive));
    const double dt = 1.0 / 600.0;
    double peak = 0.0, settled_at = -1.0;
    for (int k = 1; k <= 1200; ++k) {
      sim.advance(dt);
      const double vel = sim.state().velocity[joint_index(j)];
      peak = std::max(peak, vel);
      const bool inside = std::abs(vel - v) <= 0.05 * v;
      if (inside && settled_at < 0) settled_at = k * dt;
      if (!inside) settled_at = -1.0;
    }
    EXPECT_GE(settled_at, 0.0) << joint_wire_name(j);
    EXPECT_LE(settled_at, 1.0) << joint_wire_name(j);
    EXPECT_LT(peak, 1.25 * v) << joint_wire_name(j);
  }
}

TEST(RobotSim, StopBringsVelocityJointsToRest) {
  RobotSim sim;
  sim.apply(make_command(Joint::Lift, 0.2, Mode::ArmDrive));
  for (int i = 0; i < 12; ++i) sim.advance(1.0 / 6.0);
  sim.apply(stop_command(Joint::Lift, Mode::ArmDrive));
  for (int i = 0; i < 6; ++i) sim.advance(1.0 / 6.0);
  EXPECT_LT(std::abs(sim.state().velocity[joint_index(Joint::Lift)]), 1e-3);
  const double z = sim.state().lift();
  for (int i = 0; i < 12; ++i) sim.advance(1.0 / 6.0);
  EXPECT_NEAR(sim.state().lift(), z, 1e-3);
}

TEST(RobotSim, SustainedDriveAcceleratesUntilTheCap) {
  RobotSim sim;
  std::vector<double> x = {sim.state().base.x};
  for (int t = 1; t <= 60; ++t) {
    sim.step(held(Gesture::WristRight, t), Mode::ArmDrive);
    x.push_back(sim.state().base.x);
  }
  for (int t = 1; t <= 50; ++t) {
    EXPECT_GT(x[t], x[t - 1]) << t;
    if (t >= 2) EXPECT_GT(x[t] - x[t - 1], x[t - 1] - x[t - 2]) << t;
  }
  EXPECT_NEAR(sim.state().base.y, 0.0, 1e-12);
}

TEST(RobotSim, GripperMovesAConstantStepPerTick) {
  RobotSim sim;
  const double step = sim.config().gripper_step;
  double prev = sim.state().gripper();
  for (int t = 1; t <= 8; ++t) {
    const auto cmds = sim.step(held(Gesture::FingersOpen, t), Mode::WristGripper);
    ASSERT_EQ(cmds.size(), 1u);
    EXPECT_DOUBLE_EQ(cmds[0].value, step);  // no ramp
    const double now = sim.state().gripper();
    if (prev + step <= 1.0) EXPECT_NEAR(now - prev, step, 1e-12);
    prev = now;
  }
  for (int t = 9; t <= 30; ++t) sim.step(held(Gesture::FingersOpen, t), Mode::WristGripper);
  EXPECT_DOUBLE_EQ(sim.state().gripper(), 1.0);
  sim.apply(make_command(Joint::Gripper, step, Mode::WristGripper));
  sim.advance(1.0 / 6.0);
  EXPECT_TRUE(sim.state().at_limit[joint_index(Joint::Gripper)]);
}

TEST(RobotSim, JointLimitsClampAndFlag) {
  RobotSim sim;
  for (int t = 1; t <= 200; ++t) sim.step(held(Gesture::WristUp, t), Mode::ArmDrive);
  EXPECT_DOUBLE_EQ(sim.state().lift(), sim.config().joint(Joint::Lift).max);
  EXPECT_TRUE(sim.state().at_limit[joint_index(Joint::Lift)]);
  for (int t = 1; t <= 400; ++t) sim.step(held(Gesture::WristDown, t), Mode::WristGripper);
  EXPECT_GE(sim.state().position[joint_index(Joint::WristPitch)], sim.config().joint(Joint::WristPitch).min);
}

TEST(CommandGenerator, StopPrecedesSwitch) {
  CommandGenerator gen;
  auto c = gen.generate(held(Gesture::WristUp, 1), Mode::ArmDrive);
  ASSERT_EQ(c.size(), 1u);
  c = gen.generate(held(Gesture::WristRight, 1), Mode::ArmDrive);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], stop_command(Joint::Lift, Mode::ArmDrive));
  EXPECT_EQ(c[1].joint, Joint::BaseTranslate);
  c = gen.generate(held(Gesture::Rest, 1), Mode::ArmDrive);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].is_stop());
  EXPECT_FALSE(gen.active_joint());
  EXPECT_TRUE(gen.generate(held(Gesture::Rest, 2), Mode::ArmDrive).empty());
}

TEST(CommandGenerator, SameGestureDifferentModeIsASwitch) {
  CommandGenerator gen;
  gen.generate(held(Gesture::WristUp, 1), Mode::WristGripper);
  const auto c = gen.generate(held(Gesture::WristUp, 2), Mode::ArmDrive);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].joint, Joint::WristPitch);
  EXPECT_TRUE(c[0].is_stop());
}

TEST(Wire, EncodeFormatAndRoundTrip) {
  const auto cmd = make_command(Joint::Lift, 0.0, Mode::ArmDrive);
  EXPECT_EQ(encode_command(cmd, 7), R"({"v":1,"seq":7,"joint":"lift","kind":"vel","value":0.0,"mode":"ad"})");
  for (double v : {0.1, -1e-300, 123456789.125, -0.0, 5e-324}) {
    const auto c = make_command(Joint::WristRoll, v, Mode::WristGripper);
    EXPECT_EQ(parse_command(encode_command(c, 3)), (WireCommand{3, c}));
  }
}

TEST(Wire, RejectsMalformedInput) {
  EXPECT_THROW(parse_command("garbage"), DecodeError);
  EXPECT_THROW(parse_command(R"({"v":2,"seq":1,"joint":"lift","kind":"vel","value":0.0,"mode":"ad"})"), DecodeError);
  EXPECT_THROW(parse_command(R"({"v":1,"seq":1,"joint":"elbow","kind":"vel","value":0.0,"mode":"ad"})"), DecodeError);
  EXPECT_THROW(parse_command(R"({"v":1,"seq":1,"joint":"lift","kind":"vel","value":0.0,"mode":"xx"})"), DecodeError);
  EXPECT_THROW(encode_command(make_command(Joint::Lift, INFINITY, Mode::ArmDrive), 1), ParameterError);
  JointCommand wrong{Joint::Lift, CommandKind::PositionDelta, 0.1, Mode::ArmDrive};
  EXPECT_THROW(encode_command(wrong, 1), ParameterError);
}

TEST(Config, JsonRoundTripAndValidation) {
  const auto c = default_robot_config();
  const auto back = robot_config_from_json(robot_config_to_json(c));
  EXPECT_EQ(robot_config_to_json(back), robot_config_to_json(c));
  EXPECT_TRUE(std::isinf(back.joint(Joint::BaseTranslate).max));
  const auto partial = robot_config_from_json(R"({"gripper_step":0.1})");
  EXPECT_DOUBLE_EQ(partial.gripper_step, 0.1);
  EXPECT_DOUBLE_EQ(partial.joint(Joint::Lift).max, c.joint(Joint::Lift).max);
  EXPECT_THROW(robot_config_from_json(R"({"joints":{"lift":{"initial":5.0}}})"), ParameterError);
}

TEST(State, JsonRoundTrip) {
  RobotSim sim;
  for (int t = 1; t <= 5; ++t) sim.step(held(Gesture::PalmDown, t), Mode::ArmDrive);
  const auto s = robot_state_from_json(robot_state_to_json(sim.state()));
  EXPECT_EQ(s.position, sim.state().position);
  EXPECT_EQ(s.velocity, sim.state().velocity);
  EXPECT_EQ(s.mode, Mode::ArmDrive);
  EXPECT_DOUBLE_EQ(s.base.heading, sim.state().base.heading);
}

TEST(SimServer, AppliesCommandsAndRepliesWithState) {
  SimServer server(default_robot_config(), net::Endpoint{"127.0.0.1", 0});
  std::atomic<bool> stop{false};
  std::thread t([&] { server.run(stop); });
  UdpRobotLink link(net::Endpoint{"127.0.0.1", server.port()});
  link.send(make_command(Joint::Lift, 0.2, Mode::ArmDrive));
  std::optional<RobotState> s;
  for (int i = 0; i < 40 && !(s && s->lift() > 0.6); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    s = link.poll_state();
  }
  stop = true;
  t.join();
  ASSERT_TRUE(s);
  EXPECT_GT(s->lift(), 0.6);
  EXPECT_EQ(link.next_seq(), 1u);
  EXPECT_EQ(server.dropped(), 0u);
}
