// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/trigger/trigger.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace fieldpack::trigger {

std::int64_t TriggerConfig::period_ns() const {
  return static_cast<std::int64_t>(std::llround(1e9 / fps));
}

std::optional<TriggerViolation> validate_config(const TriggerConfig& config) {
  if (!(config.fps > 0.0) || !std::isfinite(config.fps)) {
    return TriggerViolation{TriggerViolation::Kind::kFpsNotPositive,
                            "trigger fps must be positive, got " + std::to_string(config.fps)};
  }
  if (config.exposure_us == 0) {
    return TriggerViolation{TriggerViolation::Kind::kExposureNotPositive,
                            "exposure must be positive"};
  }
  const double period_us = 1e6 / config.fps;
  if (static_cast<double>(config.exposure_us) >= period_us) {
    return TriggerViolation{TriggerViolation::Kind::kExposureExceedsPeriod,
                            "exposure " + std::to_string(config.exposure_us) +
                                " us does not fit in the trigger period of " +
                                std::to_string(static_cast<long long>(std::llround(period_us))) +
                                " us"};
  }
  return std::nullopt;
}

TriggerSchedule::TriggerSchedule(TriggerConfig config, std::int64_t start_ns)
    : config_(config), start_ns_(start_ns) {
  if (auto v = validate_config(config_)) throw std::invalid_argument(v->message);
  period_ns_ = config_.period_ns();
}

std::optional<TriggerEvent> TriggerSchedule::next_event(std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  const std::int64_t nominal = start_ns_ + static_cast<std::int64_t>(next_seq_) * period_ns_;
  if (now_ns < nominal) return std::nullopt;
  TriggerEvent ev;
  ev.seq = next_seq_++;
  ev.nominal_time = nominal;
  ev.fire_time = nominal;
  ev.exposure_us = config_.exposure_us;
  return ev;
}

std::int64_t TriggerSchedule::next_fire_time() const {
  std::lock_guard lock(mu_);
  return start_ns_ + static_cast<std::int64_t>(next_seq_) * period_ns_;
}

TriggerSchedule::ExposureChange TriggerSchedule::set_exposure(std::uint32_t exposure_us) {
  std::lock_guard lock(mu_);
  TriggerConfig candidate = config_;
  candidate.exposure_us = exposure_us;
  if (auto v = validate_config(candidate)) return {std::nullopt, std::move(v)};
  config_ = candidate;
  return {next_seq_, std::nullopt};
}

TriggerConfig TriggerSchedule::config() const {
  std::lock_guard lock(mu_);
  return config_;
}

TriggerService::TriggerService(TriggerConfig config, const Clock& clock)
    : clock_(clock), initial_(config) {
  if (auto v = validate_config(config)) throw std::invalid_argument(v->message);
}

TriggerService::~TriggerService() { stop(); }

void TriggerService::subscribe(TriggerSubscriber subscriber) {
  if (running_) throw std::logic_error("subscribe after trigger start");
  subscribers_.push_back(std::move(subscriber));
}

void TriggerService::start() {
  if (running_.exchange(true)) return;
  const TriggerConfig cfg = schedule_ ? schedule_->config() : initial_;
  schedule_ = std::make_unique<TriggerSchedule>(cfg, clock_.mono_ns());
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void TriggerService::stop() {
  if (!running_.exchange(false)) return;
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

TriggerSchedule::ExposureChange TriggerService::set_exposure(std::uint32_t exposure_us) {
  if (schedule_) return schedule_->set_exposure(exposure_us);
  TriggerConfig candidate = initial_;
  candidate.exposure_us = exposure_us;
  if (auto v = validate_config(candidate)) return {std::nullopt, std::move(v)};
  initial_ = candidate;
  return {0, std::nullopt};
}

TriggerConfig TriggerService::config() const {
  return schedule_ ? schedule_->config() : initial_;
}

TriggerStats TriggerService::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

void TriggerService::loop(std::stop_token stop) {
  using namespace std::chrono;
  // Sleep in short slices so stop requests are honoured promptly.
  constexpr std::int64_t kMaxSliceNs = 20 * kNsPerMs;
  while (!stop.stop_requested()) {
    const std::int64_t due = schedule_->next_fire_time();
    const std::int64_t now = clock_.mono_ns();
    if (now < due) {
      std::this_thread::sleep_for(nanoseconds(std::min(due - now, kMaxSliceNs)));
      continue;
    }
    auto ev = schedule_->next_event(now);
    if (!ev) continue;
    ev->fire_time = now;
    const std::int64_t lateness = now - ev->nominal_time;
    ev->late = lateness > kLateThresholdNs;
    {
      std::lock_guard lock(stats_mu_);
      ++stats_.fired;
      if (ev->late) ++stats_.late;
      stats_.max_lateness_ns = std::max(stats_.max_lateness_ns, lateness);
    }
    for (const auto& sub : subscribers_) sub(*ev);
  }
}

}  // namespace fieldpack::trigger
