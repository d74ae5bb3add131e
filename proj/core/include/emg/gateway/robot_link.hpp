#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "emg/net/socket.hpp"
#include "emg/robot/command.hpp"
#include "emg/robot/robot_sim.hpp"
#include "emg/robot/sim_server.hpp"

namespace emg::gateway {

/// Where the gateway's joint commands go.
class RobotLink {
 public:
  virtual ~RobotLink() = default;
  virtual void send(const std::vector<robot::JointCommand>& commands) = 0;
  /// Called once per gateway tick after send().
  virtual void tick(double dt) = 0;
  virtual std::optional<robot::RobotState> state() = 0;
};

/// In-process simulator.
class LocalRobot : public RobotLink {
 public:
  explicit LocalRobot(robot::RobotConfig config = robot::default_robot_config()) : sim_(std::move(config)) {}
  void send(const std::vector<robot::JointCommand>& commands) override;
  void tick(double dt) override { sim_.advance(dt); }
  std::optional<robot::RobotState> state() override { return sim_.state(); }
  const robot::RobotSim& sim() const { return sim_; }

 private:
  robot::RobotSim sim_;
};

/// Simulator process reached over UDP; its state lives there.
class RemoteRobot : public RobotLink {
 public:
  explicit RemoteRobot(const net::Endpoint& simulator) : link_(simulator) {}
  void send(const std::vector<robot::JointCommand>& commands) override;
  void tick(double) override {}
  std::optional<robot::RobotState> state() override { return link_.poll_state(); }

 private:
  robot::UdpRobotLink link_;
};

}  // namespace emg::gateway
