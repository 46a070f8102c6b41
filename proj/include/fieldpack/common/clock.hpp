// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// clock.hpp -- injectable monotonic + wall clock.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace fieldpack {

constexpr std::int64_t kNsPerUs = 1'000;
constexpr std::int64_t kNsPerMs = 1'000'000;
constexpr std::int64_t kNsPerSec = 1'000'000'000;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t mono_ns() const = 0;
  virtual std::int64_t wall_ns() const = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t mono_ns() const override {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  std::int64_t wall_ns() const override {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  static const SystemClock& instance() {
    static const SystemClock clock;
    return clock;
  }
};

// Test clock; wall time tracks mono time plus a fixed epoch offset.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ns = 0,
                       std::int64_t wall_offset_ns = 1'700'000'000LL * kNsPerSec)
      : now_(start_ns), wall_offset_(wall_offset_ns) {}

  std::int64_t mono_ns() const override { return now_.load(); }
  std::int64_t wall_ns() const override { return now_.load() + wall_offset_; }

  void set(std::int64_t ns) { now_.store(ns); }
  void advance(std::int64_t ns) { now_.fetch_add(ns); }

 private:
  std::atomic<std::int64_t> now_;
  std::int64_t wall_offset_;
};

}  // namespace fieldpack
