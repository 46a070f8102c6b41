// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// imu_odom.hpp -- strapdown dead reckoning from gyro and accelerometer, with
// external pose corrections.
//
// Accelerometer readings are specific force: a level body at rest reads
// (0, 0, +9.81), and adding g = (0, 0, -9.81) in the world frame cancels it.

#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "fieldpack/common/bytes.hpp"
#include "fieldpack/sim/imu_sim.hpp"

namespace fieldpack::odom {

constexpr std::int64_t kGapThresholdNs = 100'000'000;

struct OdomState {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();  // body to world
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  std::int64_t t = 0;  // ns
  Eigen::Vector3d g{0.0, 0.0, -sim::kStandardGravity};

  // Previous sample; the first step uses the current sample in its place.
  bool has_prev = false;
  Eigen::Vector3d prev_gyro = Eigen::Vector3d::Zero();
  Eigen::Vector3d prev_accel = Eigen::Vector3d::Zero();
};

struct PoseCorrection {
  Eigen::Quaterniond q_ref = Eigen::Quaterniond::Identity();
  Eigen::Vector3d p_ref = Eigen::Vector3d::Zero();
  std::int64_t t = 0;
};

struct StepResult {
  OdomState state;
  bool applied = false;  // false: state returned unchanged
  bool gap = false;      // dt exceeded kGapThresholdNs
  std::string fault;     // non-empty when the sample was refused
};

// Rotation uses the mean of the previous and current gyro readings. The mean
// specific force is rotated by the half-step orientation, then
// v' = v + a dt and p' = p + (v + v') dt / 2.
StepResult step(const OdomState& state, const sim::ImuSample& sample);

// Overwrites p and q, keeps v. Throws std::invalid_argument if q_ref is not
// unit norm within 1e-6 or the correction lies in the future.
OdomState apply_correction(const OdomState& state, const PoseCorrection& correction);

// EVENT payload: "ODOM" tag, i64 t, q (w x y z), v, p as f64 little-endian.
constexpr std::size_t kOdomPayloadBytes = 4 + 8 + 10 * 8;
Bytes encode_odom_event(const OdomState& state);
OdomState decode_odom_event(ByteView payload);  // throws std::invalid_argument

// Thread-safe owner of one filter; samples and corrections are applied in
// arrival order under one lock.
class Odometer {
 public:
  StepResult feed(const sim::ImuSample& sample);
  void correct(const PoseCorrection& correction);  // rejects as apply_correction
  void reset(const OdomState& state = {});
  OdomState state() const;
  std::uint64_t steps() const;
  std::uint64_t gaps() const;
  std::uint64_t faults() const;
  std::uint64_t corrections() const;

 private:
  mutable std::mutex mu_;
  OdomState state_;
  std::uint64_t steps_ = 0;
  std::uint64_t gaps_ = 0;
  std::uint64_t faults_ = 0;
  std::uint64_t corrections_ = 0;
};

}  // namespace fieldpack::odom
