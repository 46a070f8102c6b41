// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/imu_sim.hpp"

#include <bit>
#include <cmath>

namespace fieldpack::sim {

bool is_finite(const ImuSample& s) { return s.gyro.allFinite() && s.accel.allFinite(); }

Bytes encode_imu_payload(const ImuSample& s) {
  Bytes out;
  out.reserve(kImuPayloadBytes);
  for (int i = 0; i < 3; ++i) put_u64le(out, std::bit_cast<std::uint64_t>(s.gyro[i]));
  for (int i = 0; i < 3; ++i) put_u64le(out, std::bit_cast<std::uint64_t>(s.accel[i]));
  put_u64le(out, static_cast<std::uint64_t>(s.mono_time));
  return out;
}

ImuSample decode_imu_payload(ByteView payload) {
  if (payload.size() != kImuPayloadBytes) {
    throw std::invalid_argument("IMU payload must be 56 bytes");
  }
  ImuSample s;
  for (int i = 0; i < 3; ++i) s.gyro[i] = std::bit_cast<double>(get_u64le(payload, 8 * i));
  for (int i = 0; i < 3; ++i) s.accel[i] = std::bit_cast<double>(get_u64le(payload, 24 + 8 * i));
  s.mono_time = static_cast<std::int64_t>(get_u64le(payload, 48));
  return s;
}

void validate_profile(const MotionProfile& profile) {
  if (!(profile.duration_s > 0.0)) {
    throw std::invalid_argument("motion profile duration must be positive");
  }
  if (profile.kind == MotionKind::kConstantTurn && profile.yaw_rate == 0.0) {
    throw std::invalid_argument("constant-turn profile needs a non-zero yaw rate");
  }
  if (!profile.accel.allFinite() || !std::isfinite(profile.yaw_rate)) {
    throw std::invalid_argument("motion profile parameters must be finite");
  }
}

ImuSimulator::ImuSimulator(MotionProfile profile, Eigen::Vector3d accel_bias,
                           Eigen::Vector3d gyro_bias)
    : profile_(std::move(profile)), accel_bias_(accel_bias), gyro_bias_(gyro_bias) {
  validate_profile(profile_);
}

TruthState ImuSimulator::truth(double t) const {
  TruthState s;
  switch (profile_.kind) {
    case MotionKind::kStationary:
      break;
    case MotionKind::kConstantAccel:
      s.v = profile_.accel * t;
      s.p = 0.5 * profile_.accel * t * t;
      break;
    case MotionKind::kConstantTurn: {
      const double w = profile_.yaw_rate;
      const double speed = profile_.accel.y() / w;
      const double yaw = w * t;
      s.q = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
      s.v = speed * Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
      s.p = (speed / w) * Eigen::Vector3d(std::sin(yaw), 1.0 - std::cos(yaw), 0.0);
      break;
    }
  }
  return s;
}

ImuSample ImuSimulator::sample(double t, std::int64_t start_ns) const {
  const Eigen::Vector3d up_reaction(0.0, 0.0, kStandardGravity);
  ImuSample s;
  s.mono_time = start_ns + static_cast<std::int64_t>(std::llround(t * 1e9));
  switch (profile_.kind) {
    case MotionKind::kStationary:
      s.accel = up_reaction;
      break;
    case MotionKind::kConstantAccel:
      s.accel = profile_.accel + up_reaction;
      break;
    case MotionKind::kConstantTurn:
      s.gyro = Eigen::Vector3d(0.0, 0.0, profile_.yaw_rate);
      s.accel = Eigen::Vector3d(0.0, profile_.accel.y(), 0.0) + up_reaction;
      break;
  }
  s.accel += accel_bias_;
  s.gyro += gyro_bias_;
  return s;
}

}  // namespace fieldpack::sim
