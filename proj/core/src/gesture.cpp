#include "emg/gesture.hpp"

namespace emg {

namespace {
constexpr std::array<std::string_view, kGestureCount> kNames = {
    "Rest",      "Fingers Closed", "Fingers Open", "Wrist Left", "Wrist Right",
    "Wrist Up",  "Wrist Down",     "Palm Down",    "Palm Up",    "Pinch Fingers",
};
}  // namespace

std::string_view gesture_name(Gesture g) { return kNames[index_of(g)]; }

std::optional<Gesture> gesture_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllGestures[i];
  }
  return std::nullopt;
}

std::optional<Gesture> gesture_from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kGestureCount)) return std::nullopt;
  return kAllGestures[static_cast<std::size_t>(id)];
}

std::string_view mode_name(Mode m) { return m == Mode::WristGripper ? "WristGripper" : "ArmDrive"; }

std::string_view mode_wire_tag(Mode m) { return m == Mode::WristGripper ? "wg" : "ad"; }

std::optional<Mode> mode_from_wire_tag(std::string_view tag) {
  if (tag == "wg") return Mode::WristGripper;
  if (tag == "ad") return Mode::ArmDrive;
  return std::nullopt;
}

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "WristGripper") return Mode::WristGripper;
  if (name == "ArmDrive") return Mode::ArmDrive;
  return std::nullopt;
}

}  // namespace emg
