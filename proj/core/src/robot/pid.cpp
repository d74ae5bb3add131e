#include "emg/robot/pid.hpp"

#include <algorithm>

namespace emg::robot {

double PidController::update(double error, double dt) {
  integral_ = std::clamp(integral_ + error * dt, -gains_.integral_limit, gains_.integral_limit);
  const double derivative = primed_ ? (error - previous_error_) / dt : 0.0;
  previous_error_ = error;
  primed_ = true;
  return gains_.kp * error + gains_.ki * integral_ + gains_.kd * derivative;
}

void PidController::reset() {
  integral_ = 0.0;
  previous_error_ = 0.0;
  primed_ = false;
}

}  // namespace emg::robot
