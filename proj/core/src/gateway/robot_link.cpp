#include "emg/gateway/robot_link.hpp"

namespace emg::gateway {

void LocalRobot::send(const std::vector<robot::JointCommand>& commands) {
  for (const auto& c : commands) sim_.apply(c);
}

void RemoteRobot::send(const std::vector<robot::JointCommand>& commands) {
  for (const auto& c : commands) link_.send(c);
}

}  // namespace emg::gateway
