#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "emg/gateway/events.hpp"

namespace emg::gateway {

inline constexpr std::size_t kDefaultOutboxCapacity = 1024;

/// Per-client outbound buffer. A queued robot_state is replaced in place by
/// a newer one; any other event that does not fit overflows the outbox,
/// which then refuses everything and should be disconnected.
class ClientOutbox {
 public:
  explicit ClientOutbox(std::size_t capacity = kDefaultOutboxCapacity) : capacity_(capacity) {}

  /// false once the outbox has overflowed.
  bool push(const Event& e);
  std::optional<Event> pop();
  const Event* front() const { return queue_.empty() ? nullptr : &queue_.front(); }

  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }
  bool overflowed() const { return overflowed_; }
  std::size_t coalesced() const { return coalesced_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::deque<Event> queue_;
  bool overflowed_ = false;
  std::size_t coalesced_ = 0;
};

}  // namespace emg::gateway
