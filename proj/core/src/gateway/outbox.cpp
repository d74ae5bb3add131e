#include "emg/gateway/outbox.hpp"

#include <algorithm>

namespace emg::gateway {

bool ClientOutbox::push(const Event& e) {
  if (overflowed_) return false;
  if (e.type == EventType::RobotState) {
    const auto it = std::find_if(queue_.begin(), queue_.end(), [](const Event& q) { return q.type == EventType::RobotState; });
    if (it != queue_.end()) {
      queue_.erase(it);
      queue_.push_back(e);
      ++coalesced_;
      return true;
    }
  }
  if (queue_.size() >= capacity_) {
    overflowed_ = true;
    return false;
  }
  queue_.push_back(e);
  return true;
}

std::optional<Event> ClientOutbox::pop() {
  if (queue_.empty()) return std::nullopt;
  Event e = std::move(queue_.front());
  queue_.pop_front();
  return e;
}

}  // namespace emg::gateway
