// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fieldpack/odom/imu_odom.hpp"

using namespace fieldpack;
using namespace fieldpack::odom;
using sim::ImuSample;

namespace {

constexpr std::int64_t kSec = 1'000'000'000;

// Integrates a simulator from its truth at t=0 with period dt_ns. Calls
// on_step(t_s, state) after each step; a non-null return overrides the state.
template <typename Hook>
OdomState run(const sim::ImuSimulator& sim, double duration_s, std::int64_t dt_ns, Hook hook) {
  OdomState s;
  const sim::TruthState t0 = sim.truth(0.0);
  s.q = t0.q;
  s.v = t0.v;
  s.p = t0.p;
  const std::int64_t end = static_cast<std::int64_t>(std::llround(duration_s * 1e9));
  for (std::int64_t t = dt_ns; t <= end; t += dt_ns) {
    ImuSample smp = sim.sample(static_cast<double>(t) * 1e-9);
    smp.mono_time = t;
    const StepResult r = step(s, smp);
    REQUIRE(r.applied);
    s = r.state;
    hook(t, s);
  }
  return s;
}

OdomState run(const sim::ImuSimulator& sim, double duration_s, std::int64_t dt_ns) {
  return run(sim, duration_s, dt_ns, [](std::int64_t, OdomState&) {});
}

double angle_between(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return a.angularDistance(b);
}

}  // namespace

TEST_CASE("stationary input is a fixed point") {
  const sim::ImuSimulator sim({sim::MotionKind::kStationary, {}, 0.0, 1.0});
  OdomState s;
  for (int i = 1; i <= 10000; ++i) {
    ImuSample smp = sim.sample(0.0);
    smp.mono_time = i * 10'000'000LL;
    s = step(s, smp).state;
    REQUIRE(s.v == Eigen::Vector3d::Zero());
    REQUIRE(s.p == Eigen::Vector3d::Zero());
    REQUIRE(s.q.coeffs() == Eigen::Quaterniond::Identity().coeffs());
  }
}

TEST_CASE("constant acceleration matches the closed form") {
  const Eigen::Vector3d a(1.0, 0.0, 0.0);
  const sim::ImuSimulator sim({sim::MotionKind::kConstantAccel, a, 0.0, 2.0});
  const OdomState s = run(sim, 2.0, kSec / 100);
  const double t = 2.0;
  CHECK((s.v - a * t).norm() < 1e-9);
  CHECK((s.p - 0.5 * a * t * t).norm() < 1e-9);
  CHECK(s.v.x() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.p.x() == doctest::Approx(2.0).epsilon(1e-12));

  const Eigen::Vector3d a3(0.3, -0.7, 0.2);
  const sim::ImuSimulator sim3({sim::MotionKind::kConstantAccel, a3, 0.0, 3.0});
  const OdomState s3 = run(sim3, 3.0, kSec / 200);
  CHECK((s3.v - a3 * 3.0).norm() < 1e-9);
  CHECK((s3.p - 0.5 * a3 * 9.0).norm() < 1e-9);
}

TEST_CASE("quarter turn about z matches the axis-angle quaternion") {
  OdomState s;
  for (int i = 1; i <= 100; ++i) {
    ImuSample smp;
    smp.gyro = {0.0, 0.0, std::numbers::pi / 2};
    smp.accel = {0.0, 0.0, sim::kStandardGravity};
    smp.mono_time = i * 10'000'000LL;
    s = step(s, smp).state;
    REQUIRE(std::abs(s.q.norm() - 1.0) < 1e-9);
  }
  const double h = std::numbers::pi / 4;
  const Eigen::Quaterniond oracle(std::cos(h), 0.0, 0.0, std::sin(h));
  CHECK(angle_between(s.q, oracle) < 1e-6);
  CHECK(std::abs(std::abs(s.q.dot(oracle)) - 1.0) < 1e-12);
}

TEST_CASE("halving dt reduces constant-turn error at least 3.5x") {
  // 2 m/s forward at 0.5 rad/s.
  const sim::ImuSimulator sim({sim::MotionKind::kConstantTurn, {0.0, 1.0, 0.0}, 0.5, 10.0});
  const Eigen::Vector3d truth = sim.truth(10.0).p;
  std::vector<double> err;
  for (std::int64_t dt : {kSec / 25, kSec / 50, kSec / 100, kSec / 200}) {
    err.push_back((run(sim, 10.0, dt).p - truth).norm());
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    INFO("err " << err[i - 1] << " -> " << err[i]);
    CHECK(err[i - 1] / err[i] >= 3.5);
  }
}

TEST_CASE("quaternion stays unit norm") {
  const sim::ImuSimulator sim({sim::MotionKind::kConstantTurn, {0.0, 3.0, 0.0}, 2.5, 20.0},
                              {0.01, 0.0, 0.0}, {0.003, -0.002, 0.001});
  run(sim, 20.0, kSec / 400, [](std::int64_t, OdomState& s) { REQUIRE(std::abs(s.q.norm() - 1.0) < 1e-9); });
}

TEST_CASE("step errors") {
  OdomState s;
  s.t = 5;
  ImuSample bad;
  bad.mono_time = 10;
  bad.accel.x() = std::numeric_limits<double>::quiet_NaN();
  StepResult r = step(s, bad);
  CHECK_FALSE(r.applied);
  CHECK_FALSE(r.fault.empty());
  CHECK(r.state.t == 5);
  CHECK(r.state.p == s.p);

  ImuSample late;
  late.mono_time = 5;
  CHECK_FALSE(step(s, late).applied);

  ImuSample gap;
  gap.accel.z() = sim::kStandardGravity;
  gap.mono_time = 5 + 150'000'000;
  r = step(s, gap);
  CHECK(r.applied);
  CHECK(r.gap);
  gap.mono_time += 100'000'000;
  CHECK_FALSE(step(r.state, gap).gap);
}

TEST_CASE("corrections overwrite pose and keep velocity") {
  OdomState s;
  s.p = {5, 0, 0};
  s.v = {1, 2, 3};
  s.t = 100;
  const OdomState c = apply_correction(s, {Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(), 50});
  CHECK(c.p == Eigen::Vector3d::Zero());
  CHECK(c.v == s.v);
  CHECK(c.t == s.t);

  s.q = Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitY()));
  const OdomState same = apply_correction(s, {s.q, s.p, 100});
  CHECK(same.p == s.p);
  CHECK(same.v == s.v);
  CHECK(angle_between(same.q, s.q) < 1e-15);

  CHECK_THROWS_AS(apply_correction(s, {Eigen::Quaterniond(2, 0, 0, 0), s.p, 0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_correction(s, {s.q, s.p, 101}), std::invalid_argument);
}

TEST_CASE("a mid-run correction reduces final error") {
  const Eigen::Vector3d a(1.0, 0.5, 0.0);
  const sim::ImuSimulator sim({sim::MotionKind::kConstantAccel, a, 0.0, 2.0}, {0.05, -0.02, 0.01});
  const Eigen::Vector3d truth = sim.truth(2.0).p;
  const double uncorrected = (run(sim, 2.0, kSec / 100).p - truth).norm();
  const OdomState corrected = run(sim, 2.0, kSec / 100, [&](std::int64_t t, OdomState& s) {
    if (t == kSec) {
      const sim::TruthState tr = sim.truth(1.0);
      s = apply_correction(s, {tr.q, tr.p, t});
    }
  });
  const double corrected_err = (corrected.p - truth).norm();
  INFO(uncorrected << " vs " << corrected_err);
  CHECK(uncorrected > 0.0);
  CHECK(corrected_err < uncorrected);
}

TEST_CASE("drift is unbounded without corrections and bounded with them") {
  // A body-frame accel bias b rotates with the body, so velocity error stays
  // within 2b/w and position error between 1 s corrections within 2b/w * 1 s.
  const double w = 0.5;
  const double b = 0.02;
  const sim::ImuSimulator sim({sim::MotionKind::kConstantTurn, {0.0, 1.0, 0.0}, w, 120.0}, {b, 0.0, 0.0});
  double free_err = 0.0;
  run(sim, 120.0, kSec / 100, [&](std::int64_t t, OdomState& s) {
    free_err = (s.p - sim.truth(static_cast<double>(t) * 1e-9).p).norm();
  });
  double worst = 0.0;
  run(sim, 120.0, kSec / 100, [&](std::int64_t t, OdomState& s) {
    const sim::TruthState tr = sim.truth(static_cast<double>(t) * 1e-9);
    worst = std::max(worst, (s.p - tr.p).norm());
    if (t % kSec == 0) s = apply_correction(s, {tr.q, tr.p, t});
  });
  const double bound = 2.0 * b / w * 1.0;
  INFO("free " << free_err << " corrected worst " << worst << " bound " << bound);
  CHECK(free_err > 20.0 * bound);
  CHECK(worst <= bound * 1.05);
}

TEST_CASE("odometry event payload round-trip") {
  OdomState s;
  s.t = 123456789;
  s.q = Eigen::Quaterniond(Eigen::AngleAxisd(1.1, Eigen::Vector3d(1, 2, 3).normalized()));
  s.v = {0.1, -2, 3e-7};
  s.p = {1e6, -4, 0};
  const Bytes b = encode_odom_event(s);
  CHECK(b.size() == kOdomPayloadBytes);
  const OdomState d = decode_odom_event(b);
  CHECK(d.t == s.t);
  CHECK(d.q.coeffs() == s.q.coeffs());
  CHECK(d.v == s.v);
  CHECK(d.p == s.p);
  Bytes bad = b;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_odom_event(bad), std::invalid_argument);
  bad = b;
  bad.pop_back();
  CHECK_THROWS_AS(decode_odom_event(bad), std::invalid_argument);
}

TEST_CASE("odometer counts steps, gaps, faults and corrections") {
  Odometer o;
  ImuSample s;
  s.accel.z() = sim::kStandardGravity;
  s.mono_time = 10'000'000;
  CHECK(o.feed(s).applied);
  s.mono_time = 500'000'000;
  CHECK(o.feed(s).gap);
  CHECK_FALSE(o.feed(s).applied);
  o.correct({Eigen::Quaterniond::Identity(), {1, 1, 1}, 0});
  CHECK_THROWS(o.correct({Eigen::Quaterniond::Identity(), {1, 1, 1}, 600'000'000}));
  CHECK(o.steps() == 2);
  CHECK(o.gaps() == 1);
  CHECK(o.faults() == 1);
  CHECK(o.corrections() == 1);
  CHECK(o.state().p == Eigen::Vector3d(1, 1, 1));
}
