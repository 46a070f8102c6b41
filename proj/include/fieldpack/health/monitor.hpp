// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// monitor.hpp -- fault detectors, per-sensor health and the status snapshot.
//
// One mutex serializes detector input, ticks and operator commands, so every
// transition has a total order. Faults never attach to an OFF sensor, and a
// sensor is in ERR exactly when it has at least one active fault.

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/common/clock.hpp"
#include "fieldpack/health/state_machine.hpp"

namespace fieldpack::health {

enum class FaultKind : std::uint8_t {
  kDisconnected,
  kOverheat,
  kObstruction,
  kGnssDenied,
  kQueueOverflow,
  kDiskFull,
  kDiskLow,
};

inline constexpr std::array kAllFaultKinds = {
    FaultKind::kDisconnected, FaultKind::kOverheat,  FaultKind::kObstruction, FaultKind::kGnssDenied,
    FaultKind::kQueueOverflow, FaultKind::kDiskFull, FaultKind::kDiskLow};

std::string_view to_string(FaultKind k);

struct Fault {
  FaultKind kind = FaultKind::kDisconnected;
  SensorId sensor_id = 0;
  std::int64_t raised_at_ns = 0;
  std::string details;
};

struct Thresholds {
  double overheat_c = 75.0;
  int overheat_frames = 3;
  double obstruction_ratio = 0.95;
  double obstruction_range_m = 0.5;
  std::int64_t obstruction_window_ns = kNsPerSec;
  std::int64_t gnss_denied_ns = 10 * kNsPerSec;
  std::int64_t clear_hold_ns = 2 * kNsPerSec;
  std::uint64_t disk_low_bytes = 2ULL << 30;
  std::int64_t cal_duration_ns = 10 * kNsPerSec;
};

struct SensorStatus {
  SensorId id = 0;
  std::string name;
  SensorKind kind = SensorKind::kCamera;
  SensorState state = SensorState::kOff;
};

struct StatusSnapshot {
  std::vector<SensorStatus> sensors;  // descriptor order
  std::vector<Fault> faults;          // active, ordered by (sensor, kind)
  std::uint64_t disk_free_bytes = 0;
  double camera_fps_measured = 0.0;
  bool recording = false;
  double uptime_s = 0.0;
  std::int64_t mono_ns = 0;

  const SensorStatus* find(std::string_view name) const;
  bool has_fault(SensorId id, FaultKind kind) const;
};

struct CommandResult {
  bool accepted = false;
  std::string reason;
  int transitions = 0;
};

struct Transition {
  SensorId id = 0;
  SensorState from = SensorState::kOff;
  SensorState to = SensorState::kOff;
  HealthEvent event = HealthEvent::kStop;
  std::string cause;
};

using TransitionListener = std::function<void(const Transition&)>;

class HealthMonitor {
 public:
  HealthMonitor(std::vector<SensorDescriptor> sensors, Thresholds thresholds, const Clock& clock);

  // Called under the monitor lock; must not call back into the monitor.
  void set_listener(TransitionListener listener);

  // Observations from ingest paths.
  void observe_arrival(SensorId id, std::int64_t now_ns);
  void observe_frame(SensorId id, double temperature_c, std::int64_t now_ns);
  void observe_lidar(SensorId id, std::uint32_t returns, std::uint32_t near_or_zero, std::int64_t now_ns);
  void observe_gnss(SensorId id, int fix_quality, std::int64_t now_ns);
  void observe_disk_free(std::uint64_t bytes, std::int64_t now_ns);
  void note_pair(std::int64_t now_ns);

  // Event-style faults (queue overflow, disk full). Each signal restarts the
  // clear hold. System-wide faults use kSystemSensorId.
  void signal_fault(SensorId id, FaultKind kind, std::string details, std::int64_t now_ns);

  // Evaluates level detectors, clear holds and calibration timers.
  void tick(std::int64_t now_ns);

  // Operator commands.
  CommandResult start_sensors(const std::set<SensorId>& failed = {});
  CommandResult stop_sensors();
  CommandResult record_on();
  CommandResult record_off();
  CommandResult toggle_recording();
  CommandResult start_cal(std::optional<SensorId> id = std::nullopt);

  StatusSnapshot snapshot() const;
  SensorState state(SensorId id) const;
  // Lock-free read for the recording gate.
  bool is_recording(SensorId id) const;
  bool session_active() const { return recording_flag_.load(); }
  std::vector<Fault> active_faults() const;
  const Thresholds& thresholds() const { return thresholds_; }
  const std::vector<SensorDescriptor>& sensors() const { return descriptors_; }

 private:
  struct Latch {
    bool active = false;
    std::optional<std::int64_t> false_since;
    Fault fault;
  };
  struct Track {
    SensorDescriptor desc;
    SensorState state = SensorState::kOff;
    std::int64_t last_arrival = 0;
    int hot_frames = 0;
    std::deque<std::array<std::int64_t, 3>> lidar;  // t, returns, near
    std::int64_t lidar_returns = 0;
    std::int64_t lidar_near = 0;
    std::optional<std::int64_t> gnss_zero_since;
    std::int64_t cal_end = 0;
    std::map<FaultKind, Latch> latches;
  };

  Track* track(SensorId id);
  const Track* track(SensorId id) const;
  bool apply(Track& t, HealthEvent e, const std::string& cause);
  void update_level(Track* t, SensorId id, FaultKind kind, bool condition, std::int64_t now,
                    const std::string& details);
  void raise(Track* t, SensorId id, FaultKind kind, std::string details, std::int64_t now);
  void clear(Track* t, SensorId id, FaultKind kind);
  bool sensor_active(const Track& t) const;
  void publish_state(const Track& t);
  void clear_all_faults(Track* t);
  int record_on_locked();
  int record_off_locked();

  const Clock& clock_;
  Thresholds thresholds_;
  std::vector<SensorDescriptor> descriptors_;
  std::int64_t start_mono_;
  mutable std::mutex mu_;
  std::vector<Track> tracks_;
  std::array<int, 256> index_{};
  std::map<FaultKind, Latch> system_latches_;
  std::array<std::atomic<std::uint8_t>, 256> fast_state_{};
  std::atomic<bool> recording_flag_{false};
  std::uint64_t disk_free_ = 0;
  std::deque<std::int64_t> pairs_;
  TransitionListener listener_;
};

}  // namespace fieldpack::health
