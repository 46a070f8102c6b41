// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// bounded_queue.hpp -- fixed-capacity queues used between pipeline stages.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace fieldpack {

enum class PushResult { kAccepted, kFull, kClosed };

// Multi-producer, multi-consumer FIFO with a hard capacity.
// try_push never blocks and never evicts queued items (drop-newest).
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  BoundedQueue(const BoundedQueue&) = delete;
  BoundedQueue& operator=(const BoundedQueue&) = delete;

  PushResult try_push(T item) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return PushResult::kClosed;
      if (items_.size() >= capacity_) return PushResult::kFull;
      items_.push_back(std::move(item));
    }
    not_empty_.notify_one();
    return PushResult::kAccepted;
  }

  // Blocks while full, up to the timeout.
  template <typename Rep, typename Period>
  PushResult push_wait(T item, std::chrono::duration<Rep, Period> timeout) {
    {
      std::unique_lock lock(mu_);
      if (!not_full_.wait_for(lock, timeout,
                              [&] { return closed_ || items_.size() < capacity_; })) {
        return PushResult::kFull;
      }
      if (closed_) return PushResult::kClosed;
      items_.push_back(std::move(item));
    }
    not_empty_.notify_one();
    return PushResult::kAccepted;
  }

  // Returns nullopt on timeout, or once closed and drained.
  template <typename Rep, typename Period>
  std::optional<T> pop_wait(std::chrono::duration<Rep, Period> timeout) {
    std::optional<T> out;
    {
      std::unique_lock lock(mu_);
      not_empty_.wait_for(lock, timeout, [&] { return closed_ || !items_.empty(); });
      if (items_.empty()) return std::nullopt;
      out.emplace(std::move(items_.front()));
      items_.pop_front();
    }
    not_full_.notify_one();
    return out;
  }

  std::optional<T> try_pop() {
    std::optional<T> out;
    {
      std::lock_guard lock(mu_);
      if (items_.empty()) return std::nullopt;
      out.emplace(std::move(items_.front()));
      items_.pop_front();
    }
    not_full_.notify_one();
    return out;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

  std::size_t capacity() const { return capacity_; }

 private:
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

// Keeps only the newest `capacity` items; pushing into a full ring evicts the
// oldest and counts it. Used for preview paths only.
template <typename T>
class DropOldestRing {
 public:
  explicit DropOldestRing(std::size_t capacity) : capacity_(capacity) {}

  void push(T item) {
    std::lock_guard lock(mu_);
    if (items_.size() >= capacity_) {
      items_.pop_front();
      ++evicted_;
    }
    items_.push_back(std::move(item));
  }

  std::optional<T> pop() {
    std::lock_guard lock(mu_);
    if (items_.empty()) return std::nullopt;
    T out = std::move(items_.front());
    items_.pop_front();
    return out;
  }

  std::size_t evicted() const {
    std::lock_guard lock(mu_);
    return evicted_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

 private:
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<T> items_;
  std::size_t evicted_ = 0;
};

}  // namespace fieldpack
