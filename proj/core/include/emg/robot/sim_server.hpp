#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <vector>

#include "emg/net/socket.hpp"
#include "emg/robot/robot_sim.hpp"
#include "emg/robot/wire.hpp"

namespace emg::robot {

/// UDP front end of the simulator. Datagrams received during a tick are
/// applied at the tick boundary (latest command per joint wins); after
/// every tick the state snapshot is sent to each peer that has sent a
/// command.
class SimServer {
 public:
  SimServer(RobotConfig config, const net::Endpoint& listen);

  std::uint16_t port() const { return socket_.local_port(); }

  /// Runs wall-clock ticks at the configured rate until `stop` is set.
  void run(const std::atomic<bool>& stop, const std::function<void(const RobotState&)>& on_tick = {});

  RobotState snapshot() const;
  std::uint64_t dropped() const;
  std::uint64_t malformed() const;

 private:
  void handle(const net::Datagram& d);
  void tick();

  net::UdpSocket socket_;
  RobotSim sim_;
  CommandReceiver receiver_;
  std::array<std::optional<JointCommand>, kJointCount> pending_;
  std::vector<net::Endpoint> peers_;
  std::uint64_t malformed_ = 0;
  mutable std::mutex mu_;
};

/// Sends generated commands to a remote simulator with increasing seq and
/// collects its state replies.
class UdpRobotLink {
 public:
  explicit UdpRobotLink(const net::Endpoint& simulator);

  void send(const JointCommand& cmd);
  /// Drains pending replies; returns the newest state seen so far.
  std::optional<RobotState> poll_state();
  std::uint32_t next_seq() const { return seq_; }

 private:
  net::UdpSocket socket_;
  net::Endpoint remote_;
  std::uint32_t seq_ = 0;
  std::optional<RobotState> latest_;
};

}  // namespace emg::robot
