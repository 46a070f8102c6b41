// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "doctest.h"
#include "fieldpack/health/monitor.hpp"

using namespace fieldpack;
using namespace fieldpack::health;

namespace {

using S = SensorState;
using E = HealthEvent;
using K = SensorKind;

// The table as literal rows, independent of the switch in transition().
std::optional<S> oracle(S s, E e, K k) {
  static const std::map<std::tuple<S, E>, S> rows = {
      {{S::kOff, E::kStartOk}, S::kIdle},    {{S::kOff, E::kStartFail}, S::kErr},
      {{S::kIdle, E::kRecordOn}, S::kRec},   {{S::kRec, E::kRecordOff}, S::kIdle},
      {{S::kIdle, E::kCalStart}, S::kCal},   {{S::kCal, E::kCalDone}, S::kIdle},
      {{S::kIdle, E::kFault}, S::kErr},      {{S::kRec, E::kFault}, S::kErr},
      {{S::kCal, E::kFault}, S::kErr},       {{S::kErr, E::kFaultCleared}, S::kIdle},
      {{S::kOff, E::kStop}, S::kOff},        {{S::kIdle, E::kStop}, S::kOff},
      {{S::kRec, E::kStop}, S::kOff},        {{S::kErr, E::kStop}, S::kOff},
      {{S::kCal, E::kStop}, S::kOff},
  };
  if (e == E::kCalStart && k != K::kImu) return std::nullopt;
  auto it = rows.find({s, e});
  if (it == rows.end()) return std::nullopt;
  return it->second;
}

std::vector<SensorDescriptor> rig() {
  return {
      {1, "CAM_L", K::kCamera, 10.0, 2000.0}, {2, "CAM_R", K::kCamera, 10.0, 2000.0},
      {3, "LIDAR", K::kLidar, 750.0, 1000.0}, {4, "IMU", K::kImu, 100.0, 500.0},
      {5, "GNSS", K::kGnss, 1.0, 10000.0},
  };
}

constexpr std::int64_t ms(std::int64_t v) { return v * kNsPerMs; }

// Feeds every sensor except those in `quiet` at its nominal cadence, ticking at 10 Hz.
struct Sim {
  ManualClock clock{0};
  HealthMonitor mon{rig(), Thresholds{}, clock};
  std::set<SensorId> quiet;

  void run_until(std::int64_t end) {
    while (clock.mono_ns() < end) {
      clock.advance(ms(100));
      const auto now = clock.mono_ns();
      for (const auto& d : rig()) {
        if (quiet.contains(d.id)) continue;
        mon.observe_arrival(d.id, now);
        if (d.kind == K::kLidar) mon.observe_lidar(d.id, 384 * 75, 0, now);
        if (d.kind == K::kGnss) mon.observe_gnss(d.id, 1, now);
      }
      mon.tick(now);
    }
  }
};

}  // namespace

TEST_CASE("state machine matches the table for every (state, event, kind)") {
  int checked = 0;
  for (auto k : {K::kCamera, K::kLidar, K::kImu, K::kGnss}) {
    for (auto s : kAllStates) {
      for (auto e : kAllEvents) {
        CHECK_MESSAGE(transition(s, e, k) == oracle(s, e, k),
                      to_string(s) << " + " << to_string(e) << " kind " << to_string(k));
        ++checked;
      }
    }
  }
  CHECK(checked == 4 * 5 * 9);
}

TEST_CASE("CAL is unreachable for non-IMU kinds") {
  for (auto k : {K::kCamera, K::kLidar, K::kGnss}) {
    std::set<S> seen = {S::kOff};
    std::vector<S> frontier = {S::kOff};
    while (!frontier.empty()) {
      const S s = frontier.back();
      frontier.pop_back();
      for (auto e : kAllEvents) {
        if (auto n = transition(s, e, k); n && seen.insert(*n).second) frontier.push_back(*n);
      }
    }
    CHECK_FALSE(seen.contains(S::kCal));
    CHECK(seen.size() == 4);
  }
  CHECK(transition(S::kIdle, E::kCalStart, K::kImu) == S::kCal);
}

TEST_CASE("documented transition examples") {
  CHECK(transition(S::kIdle, E::kRecordOn, K::kCamera) == S::kRec);
  CHECK(transition(S::kIdle, E::kCalStart, K::kCamera) == std::nullopt);
  CHECK(transition(S::kRec, E::kFault, K::kLidar) == S::kErr);
  CHECK(parse_state("CAL") == S::kCal);
  CHECK(parse_state("cal") == std::nullopt);
}

TEST_CASE("initial snapshot: all OFF, not recording") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  const auto s = mon.snapshot();
  REQUIRE(s.sensors.size() == 5);
  for (const auto& x : s.sensors) CHECK(x.state == S::kOff);
  CHECK_FALSE(s.recording);
  CHECK(s.faults.empty());
}

TEST_CASE("commands drive states and report rejections") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  auto r = mon.record_on();
  CHECK_FALSE(r.accepted);
  CHECK_FALSE(r.reason.empty());
  CHECK(mon.start_sensors().transitions == 5);
  CHECK_FALSE(mon.start_sensors().accepted);
  CHECK_FALSE(mon.start_cal(1).accepted);
  r = mon.start_cal(4);
  CHECK(r.accepted);
  CHECK(mon.state(4) == S::kCal);
  r = mon.record_on();
  CHECK(r.transitions == 4);
  CHECK(mon.is_recording(1));
  CHECK_FALSE(mon.is_recording(4));
  CHECK(mon.snapshot().recording);
  CHECK_FALSE(mon.record_on().accepted);  // nothing left to arm
  clock.set(ms(10'000));
  for (SensorId id : {1, 2, 3, 4, 5}) mon.observe_arrival(id, clock.mono_ns());
  mon.tick(clock.mono_ns());
  CHECK(mon.state(4) == S::kIdle);
  // with a session active, RECORD_ON arms the IMU that finished calibrating
  CHECK(mon.record_on().transitions == 1);
  CHECK(mon.toggle_recording().accepted);
  CHECK_FALSE(mon.snapshot().recording);
  for (const auto& x : mon.snapshot().sensors) CHECK(x.state == S::kIdle);
  CHECK(mon.stop_sensors().accepted);
  CHECK(mon.state(1) == S::kOff);
}

TEST_CASE("concurrent RECORD_ON: one transition, one rejection") {
  for (int trial = 0; trial < 50; ++trial) {
    ManualClock clock(0);
    HealthMonitor mon(rig(), Thresholds{}, clock);
    mon.start_sensors();
    CommandResult a, b;
    std::thread t1([&] { a = mon.record_on(); });
    std::thread t2([&] { b = mon.record_on(); });
    t1.join();
    t2.join();
    CHECK(a.accepted != b.accepted);
    CHECK(a.transitions + b.transitions == 5);
  }
}

TEST_CASE("start failure enters ERR with a fault") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  mon.start_sensors({3});
  CHECK(mon.state(3) == S::kErr);
  CHECK(mon.snapshot().has_fault(3, FaultKind::kDisconnected));
}

TEST_CASE("DISCONNECTED after the silence timeout, cleared after the hold") {
  Sim sim;
  sim.mon.start_sensors();
  sim.mon.record_on();
  sim.run_until(ms(3000));
  CHECK(sim.mon.state(3) == S::kRec);
  sim.quiet = {3};
  const std::int64_t killed = sim.clock.mono_ns();
  std::int64_t err_at = 0;
  while (sim.mon.state(3) != S::kErr && sim.clock.mono_ns() < killed + ms(5000)) {
    sim.run_until(sim.clock.mono_ns() + ms(100));
    err_at = sim.clock.mono_ns();
  }
  CHECK(sim.mon.state(3) == S::kErr);
  CHECK(err_at - killed > ms(1000));
  CHECK(err_at - killed <= ms(1500));
  const auto snap = sim.mon.snapshot();
  CHECK(snap.has_fault(3, FaultKind::kDisconnected));
  CHECK(snap.find("LIDAR")->state == S::kErr);
  // other sensors unaffected
  CHECK(sim.mon.state(1) == S::kRec);

  sim.quiet.clear();
  const std::int64_t restored = sim.clock.mono_ns();
  sim.run_until(restored + ms(1900));
  CHECK(sim.mon.state(3) == S::kErr);
  sim.run_until(restored + ms(2200));
  CHECK(sim.mon.state(3) == S::kIdle);
  CHECK(sim.mon.active_faults().empty());
}

TEST_CASE("lidar silent 1.2 s with timeout 1 s raises DISCONNECTED") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  mon.start_sensors();
  for (SensorId id : {1, 2, 4, 5}) mon.observe_arrival(id, ms(1200));
  mon.tick(ms(1200));
  CHECK(mon.state(3) == S::kErr);
  CHECK(mon.state(1) == S::kIdle);
}

TEST_CASE("OVERHEAT needs three consecutive hot frames") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  mon.start_sensors();
  mon.observe_frame(1, 80.0, ms(100));
  mon.observe_frame(1, 80.0, ms(200));
  mon.observe_frame(1, 70.0, ms(300));
  mon.observe_frame(1, 80.0, ms(400));
  mon.observe_frame(1, 80.0, ms(500));
  CHECK(mon.state(1) == S::kIdle);
  mon.observe_frame(1, 75.0, ms(600));  // not strictly above
  mon.observe_frame(1, 76.0, ms(700));
  mon.observe_frame(1, 76.0, ms(800));
  mon.observe_frame(1, 76.0, ms(900));
  CHECK(mon.state(1) == S::kErr);
  const auto snap = mon.snapshot();
  CHECK(snap.has_fault(1, FaultKind::kOverheat));
  CHECK(snap.find("CAM_L")->state == S::kErr);
  // raising again changes nothing
  const auto before = mon.active_faults();
  mon.observe_frame(1, 90.0, ms(1000));
  const auto after = mon.active_faults();
  REQUIRE(after.size() == before.size());
  CHECK(after[0].raised_at_ns == before[0].raised_at_ns);
}

TEST_CASE("OBSTRUCTION from the ratio of near or zero returns over 1 s") {
  auto run = [](double zero_fraction) {
    ManualClock clock(0);
    HealthMonitor mon(rig(), Thresholds{}, clock);
    mon.start_sensors();
    std::mt19937_64 rng(11);
    std::int64_t total = 0, zero = 0;
    // 750 packets of 384 returns over 1 s
    for (int p = 0; p < 750; ++p) {
      std::uint32_t z = 0;
      for (int i = 0; i < 384; ++i) {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < zero_fraction) ++z;
      }
      const std::int64_t t = ms(1) + static_cast<std::int64_t>(p) * kNsPerSec / 750;
      mon.observe_lidar(3, 384, z, t);
      total += 384;
      zero += z;
    }
    mon.tick(kNsPerSec);
    const double ratio = static_cast<double>(zero) / static_cast<double>(total);
    return std::pair(mon.snapshot().has_fault(3, FaultKind::kObstruction), ratio);
  };
  auto [hit, ratio97] = run(0.97);
  CHECK(ratio97 >= 0.95);
  CHECK(hit);
  auto [miss, ratio90] = run(0.90);
  CHECK(ratio90 < 0.95);
  CHECK_FALSE(miss);
}

TEST_CASE("GNSS_DENIED only after more than 10 s without a fix") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  mon.start_sensors();
  for (int s = 1; s <= 12; ++s) {
    mon.observe_gnss(5, 1, s * kNsPerSec);
    mon.tick(s * kNsPerSec);
  }
  CHECK(mon.state(5) == S::kIdle);
  for (int s = 13; s <= 23; ++s) {
    mon.observe_gnss(5, 0, s * kNsPerSec);
    mon.tick(s * kNsPerSec);
  }
  CHECK(mon.state(5) == S::kIdle);  // exactly 10 s of no fix
  mon.observe_gnss(5, 0, 24 * kNsPerSec);
  mon.tick(24 * kNsPerSec);
  CHECK(mon.state(5) == S::kErr);
  CHECK(mon.snapshot().has_fault(5, FaultKind::kGnssDenied));
}

TEST_CASE("QUEUE_OVERFLOW clears after a quiet hold; faults on OFF sensors are ignored") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  mon.signal_fault(2, FaultKind::kQueueOverflow, "queue full", 0);
  CHECK(mon.active_faults().empty());
  mon.start_sensors();
  mon.record_on();
  mon.signal_fault(2, FaultKind::kQueueOverflow, "queue full", ms(100));
  CHECK(mon.state(2) == S::kErr);
  mon.signal_fault(2, FaultKind::kQueueOverflow, "queue full", ms(1000));
  for (SensorId id : {1, 2, 3, 4, 5}) mon.observe_arrival(id, ms(2900));
  mon.tick(ms(2900));
  CHECK(mon.state(2) == S::kErr);
  for (SensorId id : {1, 2, 3, 4, 5}) mon.observe_arrival(id, ms(3000));
  mon.tick(ms(3000));
  CHECK(mon.state(2) == S::kIdle);
}

TEST_CASE("DISK_LOW is a system fault at the low-water mark") {
  ManualClock clock(0);
  Thresholds th;
  HealthMonitor mon(rig(), th, clock);
  mon.observe_disk_free(th.disk_low_bytes, 0);
  CHECK(mon.active_faults().empty());
  mon.observe_disk_free(th.disk_low_bytes - 1, ms(100));
  auto f = mon.active_faults();
  REQUIRE(f.size() == 1);
  CHECK(f[0].kind == FaultKind::kDiskLow);
  CHECK(f[0].sensor_id == kSystemSensorId);
  CHECK(mon.snapshot().disk_free_bytes == th.disk_low_bytes - 1);
  mon.observe_disk_free(th.disk_low_bytes * 2, ms(200));
  mon.observe_disk_free(th.disk_low_bytes * 2, ms(2200));
  CHECK(mon.active_faults().empty());
}

TEST_CASE("camera fps is pairs over the trailing 2 s divided by 2") {
  ManualClock clock(0);
  HealthMonitor mon(rig(), Thresholds{}, clock);
  for (int i = 0; i < 40; ++i) mon.note_pair(ms(100) * i);
  clock.set(ms(3950));
  // pairs in (1950 ms, 3950 ms]: 2000..3900 -> 20
  CHECK(mon.snapshot().camera_fps_measured == doctest::Approx(10.0));
}

TEST_CASE("random command and fault sequences keep ERR iff fault and REC implies recording") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    ManualClock clock(0);
    HealthMonitor mon(rig(), Thresholds{}, clock);
    std::vector<Transition> log;
    mon.set_listener([&](const Transition& t) { log.push_back(t); });
    for (int step = 0; step < 60; ++step) {
      clock.advance(ms(static_cast<std::int64_t>(rng() % 700)));
      const auto now = clock.mono_ns();
      const SensorId id = static_cast<SensorId>(1 + rng() % 5);
      switch (rng() % 10) {
        case 0: mon.start_sensors(); break;
        case 1: mon.stop_sensors(); break;
        case 2: mon.record_on(); break;
        case 3: mon.record_off(); break;
        case 4: mon.start_cal(); break;
        case 5: mon.signal_fault(id, FaultKind::kQueueOverflow, "x", now); break;
        case 6: mon.observe_frame(id, 80.0, now); break;
        default:
          for (SensorId s = 1; s <= 5; ++s) {
            if (rng() % 4) mon.observe_arrival(s, now);
          }
          break;
      }
      mon.tick(now);
      const auto snap = mon.snapshot();
      for (const auto& s : snap.sensors) {
        bool faulted = false;
        for (const auto& f : snap.faults) faulted |= f.sensor_id == s.id;
        CHECK((s.state == S::kErr) == faulted);
        if (s.state == S::kRec) CHECK(snap.recording);
        if (s.state == S::kCal) CHECK(s.kind == K::kImu);
      }
    }
    for (const auto& t : log) {
      const auto kind = rig()[t.id - 1].kind;
      CHECK(transition(t.from, t.event, kind) == t.to);
    }
  }
}
