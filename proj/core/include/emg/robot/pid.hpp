#pragma once

namespace emg::robot {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  /// The integral accumulator is clamped to +-integral_limit.
  double integral_limit = 1e300;
};

/// Discrete PID: rectangular integral, backward-difference derivative.
class PidController {
 public:
  PidController() = default;
  explicit PidController(PidGains gains) : gains_(gains) {}

  /// u = Kp e + Ki sum(e dt) + Kd (e - e_prev) / dt. The first call after a
  /// reset has no derivative term.
  double update(double error, double dt);

  void reset();
  const PidGains& gains() const { return gains_; }
  double integral() const { return integral_; }
  double previous_error() const { return previous_error_; }

 private:
  PidGains gains_;
  double integral_ = 0.0;
  double previous_error_ = 0.0;
  bool primed_ = false;
};

}  // namespace emg::robot
