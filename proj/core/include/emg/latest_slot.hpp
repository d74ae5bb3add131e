#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>

namespace emg {

/// Single-producer/single-consumer handoff that keeps only the newest value.
/// The producer never blocks on the consumer.
template <typename T>
class LatestSlot {
 public:
  /// Replaces any value not yet taken. Returns true if one was overwritten.
  bool put(T value) {
    bool overwrote = false;
    {
      std::lock_guard lock(mu_);
      overwrote = value_.has_value();
      value_ = std::move(value);
      if (overwrote) ++overwritten_;
    }
    cv_.notify_one();
    return overwrote;
  }

  std::optional<T> try_take() {
    std::lock_guard lock(mu_);
    return take_locked();
  }

  template <typename Rep, typename Period>
  std::optional<T> take_for(std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return value_.has_value() || closed_; });
    return take_locked();
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

  std::size_t overwritten() const {
    std::lock_guard lock(mu_);
    return overwritten_;
  }

 private:
  std::optional<T> take_locked() {
    std::optional<T> out = std::move(value_);
    value_.reset();
    return out;
  }

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<T> value_;
  bool closed_ = false;
  std::size_t overwritten_ = 0;
};

}  // namespace emg
