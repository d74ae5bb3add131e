#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace emg::gateway {

enum class EventType { Cue, Prediction, Confidence, RobotState, Mode, Session, Error };

std::string_view event_type_name(EventType t);

/// One outbound message. `payload` is a serialized JSON object.
struct Event {
  EventType type = EventType::Session;
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  std::string payload = "{}";

  /// {"seq":..,"type":"..","tick":..,"payload":{..}}
  std::string to_json() const;
};

}  // namespace emg::gateway
