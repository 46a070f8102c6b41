// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/odom/imu_odom.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fieldpack::odom {

namespace {

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle < 1e-300) return Eigen::Quaterniond::Identity();
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, rotation_vector / angle));
}

void put_f64(Bytes& out, double v) { put_u64le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(ByteView in, std::size_t at) { return std::bit_cast<double>(get_u64le(in, at)); }

}  // namespace

StepResult step(const OdomState& state, const sim::ImuSample& sample) {
  StepResult r{state, false, false, {}};
  if (!sim::is_finite(sample)) {
    r.fault = "non-finite IMU sample";
    return r;
  }
  if (sample.mono_time <= state.t) {
    r.fault = "IMU sample does not advance time";
    return r;
  }
  const std::int64_t dt_ns = sample.mono_time - state.t;
  const double dt = static_cast<double>(dt_ns) * 1e-9;
  const Eigen::Vector3d gyro_prev = state.has_prev ? state.prev_gyro : sample.gyro;
  const Eigen::Vector3d accel_prev = state.has_prev ? state.prev_accel : sample.accel;

  OdomState& s = r.state;
  const Eigen::Vector3d omega = 0.5 * (gyro_prev + sample.gyro);
  const Eigen::Quaterniond q_next = (state.q * quat_exp(omega * dt)).normalized();
  const Eigen::Quaterniond q_mid = state.q.slerp(0.5, q_next).normalized();
  const Eigen::Vector3d a_world = q_mid * (0.5 * (accel_prev + sample.accel)) + state.g;
  const Eigen::Vector3d v_next = state.v + a_world * dt;

  s.p = state.p + 0.5 * (state.v + v_next) * dt;
  s.v = v_next;
  s.q = q_next;
  s.t = sample.mono_time;
  s.has_prev = true;
  s.prev_gyro = sample.gyro;
  s.prev_accel = sample.accel;
  r.applied = true;
  r.gap = dt_ns > kGapThresholdNs;
  return r;
}

OdomState apply_correction(const OdomState& state, const PoseCorrection& c) {
  if (!c.q_ref.coeffs().allFinite() || std::abs(c.q_ref.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("correction quaternion must be unit norm");
  }
  if (!c.p_ref.allFinite()) throw std::invalid_argument("correction position must be finite");
  if (c.t > state.t) throw std::invalid_argument("correction lies ahead of the filter time");
  OdomState out = state;
  out.q = c.q_ref.normalized();
  out.p = c.p_ref;
  return out;
}

Bytes encode_odom_event(const OdomState& s) {
  Bytes out{'O', 'D', 'O', 'M'};
  out.reserve(kOdomPayloadBytes);
  put_u64le(out, static_cast<std::uint64_t>(s.t));
  put_f64(out, s.q.w());
  put_f64(out, s.q.x());
  put_f64(out, s.q.y());
  put_f64(out, s.q.z());
  for (int i = 0; i < 3; ++i) put_f64(out, s.v[i]);
  for (int i = 0; i < 3; ++i) put_f64(out, s.p[i]);
  return out;
}

OdomState decode_odom_event(ByteView in) {
  if (in.size() != kOdomPayloadBytes || in[0] != 'O' || in[1] != 'D' || in[2] != 'O' || in[3] != 'M') {
    throw std::invalid_argument("not an odometry event payload");
  }
  OdomState s;
  s.t = static_cast<std::int64_t>(get_u64le(in, 4));
  s.q = Eigen::Quaterniond(get_f64(in, 12), get_f64(in, 20), get_f64(in, 28), get_f64(in, 36));
  for (int i = 0; i < 3; ++i) s.v[i] = get_f64(in, 44 + 8 * i);
  for (int i = 0; i < 3; ++i) s.p[i] = get_f64(in, 68 + 8 * i);
  return s;
}

StepResult Odometer::feed(const sim::ImuSample& sample) {
  std::lock_guard lock(mu_);
  StepResult r = step(state_, sample);
  if (r.applied) {
    state_ = r.state;
    ++steps_;
    if (r.gap) ++gaps_;
  } else {
    ++faults_;
  }
  return r;
}

void Odometer::correct(const PoseCorrection& c) {
  std::lock_guard lock(mu_);
  state_ = apply_correction(state_, c);
  ++corrections_;
}

void Odometer::reset(const OdomState& s) {
  std::lock_guard lock(mu_);
  state_ = s;
}

OdomState Odometer::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::uint64_t Odometer::steps() const {
  std::lock_guard lock(mu_);
  return steps_;
}

std::uint64_t Odometer::gaps() const {
  std::lock_guard lock(mu_);
  return gaps_;
}

std::uint64_t Odometer::faults() const {
  std::lock_guard lock(mu_);
  return faults_;
}

std::uint64_t Odometer::corrections() const {
  std::lock_guard lock(mu_);
  return corrections_;
}

}  // namespace fieldpack::odom
