// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// config.hpp -- the rig configuration file: sensors, trigger, simulation
// parameters, health thresholds, recorder, API, panel and the static
// topology/power description used by the budget analyzer.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/budget/budget.hpp"
#include "fieldpack/health/monitor.hpp"
#include "fieldpack/sim/frame.hpp"
#include "fieldpack/sim/imu_sim.hpp"
#include "fieldpack/sim/sources.hpp"
#include "fieldpack/trigger/trigger.hpp"

namespace fieldpack::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecorderSettings {
  std::filesystem::path root = "sessions";
  std::uint64_t roll_threshold_bytes = 512ULL << 20;
  std::size_t queue_capacity = 4096;
  std::optional<std::uint64_t> simulated_capacity_bytes;
};

struct ApiSettings {
  bool enabled = true;
  std::string bind = "0.0.0.0";
  std::uint16_t port = 8080;
  double preview_hz = 5.0;
  std::uint32_t preview_max_width = 320;
};

struct DaemonSettings {
  bool autostart = true;   // START_SENSORS once running
  bool autorecord = true;  // RECORD_ON once started
  double snapshot_hz = 4.0;
  double odom_event_hz = 10.0;
  std::string panel_device;  // empty: no panel
};

struct SimSettings {
  sim::CameraConfig camera;
  sim::LidarSimConfig lidar;
  sim::GnssSimConfig gnss;
  sim::MotionProfile imu_profile;
  Eigen::Vector3d imu_accel_bias = Eigen::Vector3d::Zero();
  Eigen::Vector3d imu_gyro_bias = Eigen::Vector3d::Zero();
  float camera_temperature_c = 35.0f;
  std::uint64_t seed = 1;
};

struct RigConfig {
  std::string name;
  std::vector<SensorDescriptor> sensors;
  std::map<SensorId, sim::CameraId> camera_sides;
  trigger::TriggerConfig trigger;
  SimSettings sim;
  health::Thresholds thresholds;
  RecorderSettings recorder;
  ApiSettings api;
  DaemonSettings daemon;
  budget::RigTopology topology;

  const SensorDescriptor* find(std::string_view name) const;
  std::optional<SensorId> camera(sim::CameraId side) const;
  std::optional<SensorId> first_of(SensorKind kind) const;
};

// Relative paths in the file resolve against base_dir. Throws ConfigError
// naming the offending key or value.
RigConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RigConfig load_config(const std::filesystem::path& path);

// Requirements for running the daemon, on top of what parsing checks: at
// least one sensor, and both cameras or none.
void validate_for_run(const RigConfig& config);

}  // namespace fieldpack::config
