// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// daemon.hpp -- wires sources, ingest, pairing, health, odometry, the
// recording queue and the session writer into one running acquisition
// process.
//
// Every datum takes the same path: stamp (Ingestor), observe (HealthMonitor),
// then either enqueue for recording or count as not-recorded. Commands are
// serialized; opening and closing a session takes the recording gate
// exclusively so no datum straddles a session boundary.

#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "fieldpack/acquisition/ingest.hpp"
#include "fieldpack/acquisition/pairing.hpp"
#include "fieldpack/acquisition/recording_queue.hpp"
#include "fieldpack/common/clock.hpp"
#include "fieldpack/config/config.hpp"
#include "fieldpack/health/monitor.hpp"
#include "fieldpack/odom/imu_odom.hpp"
#include "fieldpack/panel/link.hpp"
#include "fieldpack/recorder/session.hpp"
#include "fieldpack/sim/sources.hpp"
#include "fieldpack/trigger/trigger.hpp"

namespace fieldpack::daemon {

enum class CommandKind { kStartSensors, kStopSensors, kRecordOn, kRecordOff, kSetExposure, kStartCal };

std::string_view to_string(CommandKind k);
std::optional<CommandKind> parse_command_kind(std::string_view s);  // "RECORD_ON", ...

struct Command {
  CommandKind kind = CommandKind::kStartSensors;
  std::optional<std::uint32_t> exposure_us;  // SET_EXPOSURE
  std::optional<std::string> sensor;         // START_CAL target; default: every IMU
};

struct CommandOutcome {
  bool accepted = false;
  std::string reason;
  int transitions = 0;
  std::optional<std::uint64_t> effective_from_seq;  // SET_EXPOSURE
};

struct SessionSummary {
  rec::SessionId id;
  std::filesystem::path directory;
  acq::IngestStats stats;
  acq::PairingStats pairing;
  std::uint64_t events_recorded = 0;
  std::uint64_t events_dropped = 0;
  std::uint64_t bytes_written = 0;
  std::uint32_t segments = 0;
  double duration_s = 0.0;
};

struct DaemonOptions {
  // Panel stream (serial device or a socket in tests). When empty and the
  // config names a device, the device is opened.
  sim::UniqueFd panel_fd;
};

// Camera side frame header used by the pairing operator.
struct PairedFrame {
  std::uint64_t trigger_seq = 0;
};

class Daemon {
 public:
  // Throws config::ConfigError if the configuration cannot run.
  explicit Daemon(config::RigConfig config, DaemonOptions options = {});
  ~Daemon();

  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  // Starts sources (paused until START_SENSORS), the writer and the
  // maintenance loop; applies autostart/autorecord.
  void start();
  // Ends any session, then stops every thread. Idempotent.
  void stop();

  CommandOutcome execute(const Command& command);
  void correct_pose(const odom::PoseCorrection& correction);  // throws std::invalid_argument

  health::StatusSnapshot snapshot() const;
  acq::IngestStats stats() const;
  acq::PairingStats pairing() const;
  odom::OdomState odometry() const;
  trigger::TriggerConfig trigger_config() const;
  bool session_open() const;
  std::optional<std::filesystem::path> session_directory() const;
  std::optional<SessionSummary> last_session() const;
  std::uint64_t events_dropped() const { return events_dropped_.load(); }
  const config::RigConfig& config() const { return config_; }
  const health::HealthMonitor& health() const { return *health_; }

  // Latest camera frame and the last rotation of lidar packets, for previews.
  std::optional<sim::Frame> latest_frame(sim::CameraId side) const;
  std::vector<Bytes> latest_lidar_packets() const;

  // Fault injection.
  void kill_source(SensorId id);
  void restore_source(SensorId id);
  void set_writer_stall(bool stalled);
  void set_camera_temperature(SensorId id, float celsius);
  void set_lidar_obstructed(bool on);
  void set_gnss_denied(bool on);
  void drop_camera_frames(SensorId id, std::uint32_t n);

 private:
  struct Source;

  bool on_datum(RawDatum&& datum);
  void observe(const StampedRecord& r);
  void record(StampedRecord&& r);
  void push_event(Bytes payload, std::int64_t mono_ns, std::int64_t wall_ns);
  void handle_pairing(acq::PairingOutput<PairedFrame>&& out, std::int64_t mono, std::int64_t wall);

  void writer_loop(std::stop_token stop);
  void maintenance_loop(std::stop_token stop);
  void on_button(panel::ButtonCommand c);

  CommandOutcome execute_locked(const Command& command);
  // Runs a monitor command with the recording gate held exclusively, then
  // opens or closes the session to match the monitor. Caller holds cmd_mu_.
  template <typename Fn>
  CommandOutcome gated(Fn&& fn);
  void finish_session(const acq::IngestStats& at_close);
  void set_sources_running(bool running);
  Source* source(SensorId id);

  config::RigConfig config_;
  const Clock& clock_;
  std::unique_ptr<acq::Ingestor> ingestor_;
  std::unique_ptr<health::HealthMonitor> health_;
  std::unique_ptr<trigger::TriggerService> trigger_;
  std::vector<std::unique_ptr<Source>> sources_;
  std::unique_ptr<panel::PanelLink> panel_;
  sim::UniqueFd panel_fd_;

  acq::RecordingQueue queue_;
  std::atomic<std::int64_t> pending_{0};  // accepted into the queue, not yet written
  std::atomic<bool> writer_stalled_{false};

  std::mutex cmd_mu_;
  mutable std::shared_mutex gate_mu_;
  bool session_open_ = false;
  std::int64_t session_start_mono_ = 0;

  mutable std::mutex writer_mu_;
  std::unique_ptr<rec::SessionWriter> writer_;
  std::optional<SessionSummary> last_session_;
  std::atomic<std::uint64_t> events_recorded_{0};
  std::atomic<std::uint64_t> events_dropped_{0};
  std::mutex event_mu_;
  std::int64_t last_event_mono_ = 0;

  mutable std::mutex pair_mu_;
  std::unique_ptr<acq::FramePairer<PairedFrame>> pairer_;

  odom::Odometer odom_;
  std::atomic<std::int64_t> last_odom_event_{0};

  mutable std::mutex preview_mu_;
  Bytes latest_raw_[2];
  std::deque<Bytes> lidar_ring_;
  std::size_t lidar_ring_size_ = 75;

  std::set<SensorId> killed_;
  bool started_ = false;
  bool stopped_ = false;
  std::jthread writer_thread_;
  std::jthread maintenance_;
};

}  // namespace fieldpack::daemon
