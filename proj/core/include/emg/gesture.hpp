#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace emg {

inline constexpr std::size_t kGestureCount = 10;

enum class Gesture : std::uint8_t {
  Rest = 0,
  FingersClosed,
  FingersOpen,
  WristLeft,
  WristRight,
  WristUp,
  WristDown,
  PalmDown,
  PalmUp,
  PinchFingers,
};

inline constexpr std::array<Gesture, kGestureCount> kAllGestures = {
    Gesture::Rest,      Gesture::FingersClosed, Gesture::FingersOpen, Gesture::WristLeft,
    Gesture::WristRight, Gesture::WristUp,      Gesture::WristDown,   Gesture::PalmDown,
    Gesture::PalmUp,    Gesture::PinchFingers,
};

constexpr std::size_t index_of(Gesture g) { return static_cast<std::size_t>(g); }

/// Display name, e.g. "Wrist Up".
std::string_view gesture_name(Gesture g);

std::optional<Gesture> gesture_from_name(std::string_view name);
std::optional<Gesture> gesture_from_id(int id);

/// The two gesture-to-joint mappings.
enum class Mode : std::uint8_t { WristGripper, ArmDrive };

std::string_view mode_name(Mode m);        // "WristGripper" / "ArmDrive"
std::string_view mode_wire_tag(Mode m);    // "wg" / "ad"
std::optional<Mode> mode_from_wire_tag(std::string_view tag);
std::optional<Mode> mode_from_name(std::string_view name);

constexpr Mode toggled(Mode m) { return m == Mode::WristGripper ? Mode::ArmDrive : Mode::WristGripper; }

}  // namespace emg
