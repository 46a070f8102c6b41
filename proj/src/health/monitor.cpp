// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/health/monitor.hpp"

#include <algorithm>
#include <cstdio>

namespace fieldpack::health {

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::kDisconnected: return "DISCONNECTED";
    case FaultKind::kOverheat: return "OVERHEAT";
    case FaultKind::kObstruction: return "OBSTRUCTION";
    case FaultKind::kGnssDenied: return "GNSS_DENIED";
    case FaultKind::kQueueOverflow: return "QUEUE_OVERFLOW";
    case FaultKind::kDiskFull: return "DISK_FULL";
    case FaultKind::kDiskLow: return "DISK_LOW";
  }
  return "?";
}

const SensorStatus* StatusSnapshot::find(std::string_view name) const {
  for (const auto& s : sensors) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool StatusSnapshot::has_fault(SensorId id, FaultKind kind) const {
  return std::any_of(faults.begin(), faults.end(),
                     [&](const Fault& f) { return f.sensor_id == id && f.kind == kind; });
}

HealthMonitor::HealthMonitor(std::vector<SensorDescriptor> sensors, Thresholds thresholds,
                             const Clock& clock)
    : clock_(clock),
      thresholds_(thresholds),
      descriptors_(std::move(sensors)),
      start_mono_(clock.mono_ns()) {
  index_.fill(-1);
  for (std::size_t i = 0; i < descriptors_.size(); ++i) {
    index_[descriptors_[i].id] = static_cast<int>(i);
    Track t;
    t.desc = descriptors_[i];
    tracks_.push_back(std::move(t));
  }
  for (auto& s : fast_state_) s.store(static_cast<std::uint8_t>(SensorState::kOff));
}

void HealthMonitor::set_listener(TransitionListener listener) {
  std::lock_guard lock(mu_);
  listener_ = std::move(listener);
}

HealthMonitor::Track* HealthMonitor::track(SensorId id) {
  const int i = index_[id];
  return i < 0 ? nullptr : &tracks_[static_cast<std::size_t>(i)];
}

const HealthMonitor::Track* HealthMonitor::track(SensorId id) const {
  const int i = index_[id];
  return i < 0 ? nullptr : &tracks_[static_cast<std::size_t>(i)];
}

bool HealthMonitor::sensor_active(const Track& t) const { return t.state != SensorState::kOff; }

void HealthMonitor::publish_state(const Track& t) {
  fast_state_[t.desc.id].store(static_cast<std::uint8_t>(t.state));
}

bool HealthMonitor::apply(Track& t, HealthEvent e, const std::string& cause) {
  const auto next = transition(t.state, e, t.desc.kind);
  if (!next) return false;
  const SensorState from = t.state;
  t.state = *next;
  publish_state(t);
  if (listener_ && from != t.state) listener_(Transition{t.desc.id, from, t.state, e, cause});
  return true;
}

void HealthMonitor::raise(Track* t, SensorId id, FaultKind kind, std::string details, std::int64_t now) {
  auto& latches = t ? t->latches : system_latches_;
  if (t && !sensor_active(*t)) return;
  Latch& l = latches[kind];
  l.false_since.reset();
  if (l.active) return;
  l.active = true;
  l.fault = Fault{kind, id, now, std::move(details)};
  if (t && t->state != SensorState::kErr) {
    apply(*t, HealthEvent::kFault, std::string(to_string(kind)));
  }
}

void HealthMonitor::clear(Track* t, SensorId /*id*/, FaultKind kind) {
  auto& latches = t ? t->latches : system_latches_;
  auto it = latches.find(kind);
  if (it == latches.end() || !it->second.active) return;
  it->second.active = false;
  it->second.false_since.reset();
  if (!t) return;
  const bool any = std::any_of(t->latches.begin(), t->latches.end(),
                               [](const auto& kv) { return kv.second.active; });
  if (!any && t->state == SensorState::kErr) {
    apply(*t, HealthEvent::kFaultCleared, std::string(to_string(kind)) + " cleared");
  }
}

void HealthMonitor::update_level(Track* t, SensorId id, FaultKind kind, bool condition,
                                 std::int64_t now, const std::string& details) {
  if (condition) {
    raise(t, id, kind, details, now);
    return;
  }
  auto& latches = t ? t->latches : system_latches_;
  auto it = latches.find(kind);
  if (it == latches.end() || !it->second.active) return;
  Latch& l = it->second;
  if (!l.false_since) l.false_since = now;
  if (now - *l.false_since >= thresholds_.clear_hold_ns) clear(t, id, kind);
}

void HealthMonitor::clear_all_faults(Track* t) {
  for (auto& [kind, l] : t->latches) {
    l.active = false;
    l.false_since.reset();
  }
}

void HealthMonitor::observe_arrival(SensorId id, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  if (Track* t = track(id)) t->last_arrival = std::max(t->last_arrival, now_ns);
}

void HealthMonitor::observe_frame(SensorId id, double temperature_c, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  Track* t = track(id);
  if (!t) return;
  t->last_arrival = std::max(t->last_arrival, now_ns);
  t->hot_frames = temperature_c > thresholds_.overheat_c ? t->hot_frames + 1 : 0;
  if (!sensor_active(*t)) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f C", temperature_c);
  update_level(t, id, FaultKind::kOverheat, t->hot_frames >= thresholds_.overheat_frames, now_ns, buf);
}

void HealthMonitor::observe_lidar(SensorId id, std::uint32_t returns, std::uint32_t near_or_zero,
                                  std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  Track* t = track(id);
  if (!t) return;
  t->last_arrival = std::max(t->last_arrival, now_ns);
  t->lidar.push_back({now_ns, returns, near_or_zero});
  t->lidar_returns += returns;
  t->lidar_near += near_or_zero;
}

void HealthMonitor::observe_gnss(SensorId id, int fix_quality, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  Track* t = track(id);
  if (!t) return;
  t->last_arrival = std::max(t->last_arrival, now_ns);
  if (fix_quality == 0) {
    if (!t->gnss_zero_since) t->gnss_zero_since = now_ns;
  } else {
    t->gnss_zero_since.reset();
  }
}

void HealthMonitor::observe_disk_free(std::uint64_t bytes, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  disk_free_ = bytes;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%llu MiB free", static_cast<unsigned long long>(bytes >> 20));
  update_level(nullptr, kSystemSensorId, FaultKind::kDiskLow, bytes < thresholds_.disk_low_bytes,
               now_ns, buf);
}

void HealthMonitor::note_pair(std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  pairs_.push_back(now_ns);
  while (!pairs_.empty() && pairs_.front() <= now_ns - 2 * kNsPerSec) pairs_.pop_front();
}

void HealthMonitor::signal_fault(SensorId id, FaultKind kind, std::string details, std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  Track* t = id == kSystemSensorId ? nullptr : track(id);
  if (id != kSystemSensorId && !t) return;
  raise(t, id, kind, std::move(details), now_ns);
  auto& latches = t ? t->latches : system_latches_;
  auto it = latches.find(kind);
  if (it != latches.end() && it->second.active) it->second.false_since = now_ns;
}

void HealthMonitor::tick(std::int64_t now_ns) {
  std::lock_guard lock(mu_);
  for (auto& t : tracks_) {
    const SensorId id = t.desc.id;
    if (!sensor_active(t)) continue;
    const auto timeout_ns = static_cast<std::int64_t>(t.desc.silence_timeout_ms * 1e6);
    const std::int64_t silent = now_ns - t.last_arrival;
    update_level(&t, id, FaultKind::kDisconnected, silent > timeout_ns, now_ns,
                 "no data for " + std::to_string(silent / kNsPerMs) + " ms");
    if (t.desc.kind == SensorKind::kCamera) {
      update_level(&t, id, FaultKind::kOverheat, t.hot_frames >= thresholds_.overheat_frames, now_ns,
                   "temperature above threshold");
    }
    if (t.desc.kind == SensorKind::kLidar) {
      while (!t.lidar.empty() && t.lidar.front()[0] <= now_ns - thresholds_.obstruction_window_ns) {
        t.lidar_returns -= t.lidar.front()[1];
        t.lidar_near -= t.lidar.front()[2];
        t.lidar.pop_front();
      }
      const bool blocked = t.lidar_returns > 0 &&
                           static_cast<double>(t.lidar_near) >=
                               thresholds_.obstruction_ratio * static_cast<double>(t.lidar_returns);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f%% near or zero returns",
                    t.lidar_returns > 0 ? 100.0 * static_cast<double>(t.lidar_near) /
                                              static_cast<double>(t.lidar_returns)
                                        : 0.0);
      update_level(&t, id, FaultKind::kObstruction, blocked, now_ns, buf);
    }
    if (t.desc.kind == SensorKind::kGnss) {
      const bool denied = t.gnss_zero_since && now_ns - *t.gnss_zero_since > thresholds_.gnss_denied_ns;
      update_level(&t, id, FaultKind::kGnssDenied, denied, now_ns, "no fix");
    }
    for (FaultKind k : {FaultKind::kQueueOverflow, FaultKind::kDiskFull}) {
      auto it = t.latches.find(k);
      if (it != t.latches.end() && it->second.active && it->second.false_since &&
          now_ns - *it->second.false_since >= thresholds_.clear_hold_ns) {
        clear(&t, id, k);
      }
    }
    if (t.state == SensorState::kCal && now_ns >= t.cal_end) apply(t, HealthEvent::kCalDone, "timer");
  }
  for (FaultKind k : {FaultKind::kQueueOverflow, FaultKind::kDiskFull}) {
    auto it = system_latches_.find(k);
    if (it != system_latches_.end() && it->second.active && it->second.false_since &&
        now_ns - *it->second.false_since >= thresholds_.clear_hold_ns) {
      clear(nullptr, kSystemSensorId, k);
    }
  }
  while (!pairs_.empty() && pairs_.front() <= now_ns - 2 * kNsPerSec) pairs_.pop_front();
}

CommandResult HealthMonitor::start_sensors(const std::set<SensorId>& failed) {
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_.mono_ns();
  CommandResult r;
  for (auto& t : tracks_) {
    if (t.state != SensorState::kOff) continue;
    t.last_arrival = now;
    t.hot_frames = 0;
    t.lidar.clear();
    t.lidar_returns = t.lidar_near = 0;
    t.gnss_zero_since.reset();
    if (failed.contains(t.desc.id)) {
      apply(t, HealthEvent::kStartFail, "start failed");
      Latch& l = t.latches[FaultKind::kDisconnected];
      l.active = true;
      l.false_since.reset();
      l.fault = Fault{FaultKind::kDisconnected, t.desc.id, now, "failed to start"};
    } else {
      apply(t, HealthEvent::kStartOk, "start");
    }
    ++r.transitions;
  }
  r.accepted = r.transitions > 0;
  if (!r.accepted) r.reason = "all sensors are already started";
  return r;
}

CommandResult HealthMonitor::stop_sensors() {
  std::lock_guard lock(mu_);
  CommandResult r;
  for (auto& t : tracks_) {
    if (t.state != SensorState::kOff) ++r.transitions;
    clear_all_faults(&t);
    apply(t, HealthEvent::kStop, "stop");
  }
  recording_flag_ = false;
  r.accepted = r.transitions > 0;
  if (!r.accepted) r.reason = "all sensors are already off";
  return r;
}

int HealthMonitor::record_on_locked() {
  int n = 0;
  for (auto& t : tracks_) {
    if (t.state == SensorState::kIdle && apply(t, HealthEvent::kRecordOn, "record on")) ++n;
  }
  if (n > 0) recording_flag_ = true;
  return n;
}

int HealthMonitor::record_off_locked() {
  int n = 0;
  for (auto& t : tracks_) {
    if (t.state == SensorState::kRec && apply(t, HealthEvent::kRecordOff, "record off")) ++n;
  }
  recording_flag_ = false;
  return n;
}

CommandResult HealthMonitor::record_on() {
  std::lock_guard lock(mu_);
  CommandResult r;
  r.transitions = record_on_locked();
  r.accepted = r.transitions > 0;
  if (!r.accepted) {
    r.reason = recording_flag_ ? "already recording; no IDLE sensor to arm"
                               : "no sensor is IDLE; start the sensors first";
  }
  return r;
}

CommandResult HealthMonitor::record_off() {
  std::lock_guard lock(mu_);
  CommandResult r;
  if (!recording_flag_) {
    r.reason = "not recording";
    return r;
  }
  r.transitions = record_off_locked();
  r.accepted = true;
  return r;
}

CommandResult HealthMonitor::toggle_recording() {
  std::lock_guard lock(mu_);
  CommandResult r;
  if (recording_flag_) {
    r.transitions = record_off_locked();
    r.accepted = true;
  } else {
    r.transitions = record_on_locked();
    r.accepted = r.transitions > 0;
    if (!r.accepted) r.reason = "no sensor is IDLE; start the sensors first";
  }
  return r;
}

CommandResult HealthMonitor::start_cal(std::optional<SensorId> id) {
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_.mono_ns();
  CommandResult r;
  for (auto& t : tracks_) {
    if (id && t.desc.id != *id) continue;
    if (t.desc.kind != SensorKind::kImu) {
      if (id) r.reason = "calibration applies to IMU sensors only";
      continue;
    }
    if (apply(t, HealthEvent::kCalStart, "calibration")) {
      t.cal_end = now + thresholds_.cal_duration_ns;
      ++r.transitions;
    } else if (r.reason.empty()) {
      r.reason = "sensor " + t.desc.name + " is " + std::string(to_string(t.state)) + ", not IDLE";
    }
  }
  r.accepted = r.transitions > 0;
  if (!r.accepted && r.reason.empty()) r.reason = id ? "unknown sensor" : "no IMU sensor";
  if (r.accepted) r.reason.clear();
  return r;
}

std::vector<Fault> HealthMonitor::active_faults() const {
  std::vector<Fault> out;
  for (const auto& t : tracks_) {
    for (const auto& [kind, l] : t.latches) {
      if (l.active) out.push_back(l.fault);
    }
  }
  for (const auto& [kind, l] : system_latches_) {
    if (l.active) out.push_back(l.fault);
  }
  std::sort(out.begin(), out.end(), [](const Fault& a, const Fault& b) {
    return std::pair(a.sensor_id, a.kind) < std::pair(b.sensor_id, b.kind);
  });
  return out;
}

StatusSnapshot HealthMonitor::snapshot() const {
  std::lock_guard lock(mu_);
  StatusSnapshot s;
  const std::int64_t now = clock_.mono_ns();
  for (const auto& t : tracks_) s.sensors.push_back({t.desc.id, t.desc.name, t.desc.kind, t.state});
  s.faults = active_faults();
  s.disk_free_bytes = disk_free_;
  const auto recent = std::count_if(pairs_.begin(), pairs_.end(),
                                    [&](std::int64_t p) { return p > now - 2 * kNsPerSec; });
  s.camera_fps_measured = static_cast<double>(recent) / 2.0;
  s.recording = recording_flag_.load();
  s.uptime_s = static_cast<double>(now - start_mono_) / 1e9;
  s.mono_ns = now;
  return s;
}

SensorState HealthMonitor::state(SensorId id) const {
  return static_cast<SensorState>(fast_state_[id].load());
}

bool HealthMonitor::is_recording(SensorId id) const { return state(id) == SensorState::kRec; }

}  // namespace fieldpack::health
