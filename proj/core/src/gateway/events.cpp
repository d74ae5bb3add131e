#include "emg/gateway/events.hpp"

namespace emg::gateway {

std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::Cue: return "cue";
    case EventType::Prediction: return "prediction";
    case EventType::Confidence: return "confidence";
    case EventType::RobotState: return "robot_state";
    case EventType::Mode: return "mode";
    case EventType::Session: return "session";
    case EventType::Error: return "error";
  }
  return "unknown";
}

std::string Event::to_json() const {
  std::string out = "{\"seq\":";
  out += std::to_string(seq);
  out += ",\"type\":\"";
  out += event_type_name(type);
  out += "\",\"tick\":";
  out += std::to_string(tick);
  out += ",\"payload\":";
  out += payload;
  out += '}';
  return out;
}

}  // namespace emg::gateway
