// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// trigger.hpp -- software model of the external camera trigger.
//
// TriggerSchedule is the deterministic core: it is driven by whatever clock
// value the caller passes in. TriggerService runs a schedule on the monotonic
// clock and broadcasts every event to all subscribed cameras.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fieldpack/common/clock.hpp"

namespace fieldpack::trigger {

struct TriggerConfig {
  double fps = 10.0;
  std::uint32_t exposure_us = 5000;

  std::int64_t period_ns() const;
};

struct TriggerViolation {
  enum class Kind { kFpsNotPositive, kExposureNotPositive, kExposureExceedsPeriod };
  Kind kind;
  std::string message;
};

// nullopt means the configuration is acceptable.
std::optional<TriggerViolation> validate_config(const TriggerConfig& config);

struct TriggerEvent {
  std::uint64_t seq = 0;
  std::int64_t fire_time = 0;     // ns; nominal time in simulated runs
  std::int64_t nominal_time = 0;  // ns
  std::uint32_t exposure_us = 0;
  bool late = false;
};

// Events fired more than this after their nominal time are flagged late.
constexpr std::int64_t kLateThresholdNs = kNsPerMs;

class TriggerSchedule {
 public:
  // Throws std::invalid_argument if the config is rejected by validate_config.
  TriggerSchedule(TriggerConfig config, std::int64_t start_ns);

  // The next unfired event if its nominal time has been reached.
  std::optional<TriggerEvent> next_event(std::int64_t now_ns);

  // Nominal time of the next unfired event.
  std::int64_t next_fire_time() const;

  // Returns the seq from which the new exposure applies, or the violation.
  struct ExposureChange {
    std::optional<std::uint64_t> effective_from;
    std::optional<TriggerViolation> violation;
  };
  ExposureChange set_exposure(std::uint32_t exposure_us);

  TriggerConfig config() const;

 private:
  mutable std::mutex mu_;
  TriggerConfig config_;
  std::int64_t start_ns_;
  std::int64_t period_ns_;
  std::uint64_t next_seq_ = 0;
};

using TriggerSubscriber = std::function<void(const TriggerEvent&)>;

struct TriggerStats {
  std::uint64_t fired = 0;
  std::uint64_t late = 0;
  std::int64_t max_lateness_ns = 0;
};

class TriggerService {
 public:
  explicit TriggerService(TriggerConfig config, const Clock& clock = SystemClock::instance());
  ~TriggerService();

  TriggerService(const TriggerService&) = delete;
  TriggerService& operator=(const TriggerService&) = delete;

  // Subscribers must be registered before start().
  void subscribe(TriggerSubscriber subscriber);
  void start();
  void stop();
  bool running() const { return running_.load(); }

  TriggerSchedule::ExposureChange set_exposure(std::uint32_t exposure_us);
  TriggerConfig config() const;
  TriggerStats stats() const;

 private:
  void loop(std::stop_token stop);

  const Clock& clock_;
  TriggerConfig initial_;
  std::unique_ptr<TriggerSchedule> schedule_;
  std::vector<TriggerSubscriber> subscribers_;
  mutable std::mutex stats_mu_;
  TriggerStats stats_;
  std::atomic<bool> running_{false};
  std::jthread thread_;
};

}  // namespace fieldpack::trigger
