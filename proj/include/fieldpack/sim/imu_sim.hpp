// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// imu_sim.hpp -- IMU samples and the motion profiles that generate them.
//
// Sign convention: the accelerometer reports specific force, so a body at
// rest and level reads (0, 0, +9.81).

#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "fieldpack/common/bytes.hpp"

namespace fieldpack::sim {

constexpr double kStandardGravity = 9.81;

struct ImuSample {
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s, body frame
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2 specific force, body frame
  std::int64_t mono_time = 0;                       // ns
};

bool is_finite(const ImuSample& s);

// Payload: 6 x f64 (gyro xyz, accel xyz) then i64 mono_time, little-endian.
constexpr std::size_t kImuPayloadBytes = 56;
Bytes encode_imu_payload(const ImuSample& s);
ImuSample decode_imu_payload(ByteView payload);  // throws std::invalid_argument

enum class MotionKind { kStationary, kConstantAccel, kConstantTurn };

// kConstantAccel: `accel` is the world-frame acceleration, body stays level
// and aligned with the world.
// kConstantTurn: level circular motion at `yaw_rate`; accel.y() is the
// body-frame centripetal acceleration, so forward speed = accel.y / yaw_rate.
struct MotionProfile {
  MotionKind kind = MotionKind::kStationary;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  double yaw_rate = 0.0;  // rad/s
  double duration_s = 1.0;
};

void validate_profile(const MotionProfile& profile);  // throws std::invalid_argument

struct TruthState {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

// Closed-form trajectory and ideal (optionally biased) IMU readings.
class ImuSimulator {
 public:
  explicit ImuSimulator(MotionProfile profile,
                        Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero(),
                        Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero());

  // t_s is seconds since profile start; the timestamp is start_ns + t_s.
  ImuSample sample(double t_s, std::int64_t start_ns = 0) const;
  TruthState truth(double t_s) const;
  const MotionProfile& profile() const { return profile_; }

 private:
  MotionProfile profile_;
  Eigen::Vector3d accel_bias_;
  Eigen::Vector3d gyro_bias_;
};

}  // namespace fieldpack::sim
