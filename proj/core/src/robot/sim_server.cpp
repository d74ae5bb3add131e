#include "emg/robot/sim_server.hpp"

#include <algorithm>
#include <chrono>

#include "emg/error.hpp"

namespace emg::robot {

SimServer::SimServer(RobotConfig config, const net::Endpoint& listen) : socket_(listen), sim_(std::move(config)) {}

void SimServer::handle(const net::Datagram& d) {
  std::lock_guard lock(mu_);
  std::optional<JointCommand> cmd;
  try {
    cmd = receiver_.accept(d.payload);
  } catch (const DecodeError&) {
    ++malformed_;
    return;
  }
  if (std::find(peers_.begin(), peers_.end(), d.from) == peers_.end()) peers_.push_back(d.from);
  if (cmd) pending_[joint_index(cmd->joint)] = *cmd;
}

void SimServer::tick() {
  std::string snap;
  std::vector<net::Endpoint> peers;
  {
    std::lock_guard lock(mu_);
    for (auto& p : pending_) {
      if (p) sim_.apply(*p);
      p.reset();
    }
    sim_.advance(sim_.config().tick_dt());
    snap = robot_state_to_json(sim_.state());
    peers = peers_;
  }
  for (const auto& peer : peers) {
    try {
      socket_.send_to(snap, peer);
    } catch (const Error&) {
    }
  }
}

void SimServer::run(const std::atomic<bool>& stop, const std::function<void(const RobotState&)>& on_tick) {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(sim_.config().tick_dt()));
  auto next = clock::now() + period;
  while (!stop) {
    const auto now = clock::now();
    if (now >= next) {
      tick();
      if (on_tick) on_tick(snapshot());
      next += period;
      continue;
    }
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next - now) + std::chrono::milliseconds(1);
    if (auto d = socket_.receive(std::min(wait, std::chrono::milliseconds(50)))) handle(*d);
  }
}

RobotState SimServer::snapshot() const {
  std::lock_guard lock(mu_);
  return sim_.state();
}

std::uint64_t SimServer::dropped() const {
  std::lock_guard lock(mu_);
  return receiver_.dropped();
}

std::uint64_t SimServer::malformed() const {
  std::lock_guard lock(mu_);
  return malformed_;
}

UdpRobotLink::UdpRobotLink(const net::Endpoint& simulator) : socket_(net::Endpoint{"0.0.0.0", 0}), remote_(simulator) {}

void UdpRobotLink::send(const JointCommand& cmd) { socket_.send_to(encode_command(cmd, ++seq_), remote_); }

std::optional<RobotState> UdpRobotLink::poll_state() {
  while (auto d = socket_.receive(std::chrono::milliseconds(0))) {
    try {
      latest_ = robot_state_from_json(d->payload);
    } catch (const DecodeError&) {
    }
  }
  return latest_;
}

}  // namespace emg::robot
