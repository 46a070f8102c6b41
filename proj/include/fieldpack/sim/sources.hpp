// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// sources.hpp -- simulated sensor sources.
//
// Periodic sources are split into a deterministic generator (what to emit and
// when) and a SourceRunner thread that paces a generator against a clock and
// hands each datum to exactly one sink. Cameras are not periodic: they emit
// only in response to trigger events.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/common/bounded_queue.hpp"
#include "fieldpack/common/clock.hpp"
#include "fieldpack/sim/frame.hpp"
#include "fieldpack/sim/imu_sim.hpp"
#include "fieldpack/sim/lidar_packet.hpp"
#include "fieldpack/sim/nmea.hpp"

namespace fieldpack::sim {

// Returns false once the consumer is gone; the source then stops.
using DatumSink = std::function<bool(RawDatum&&)>;

class PacedGenerator {
 public:
  PacedGenerator(SensorId id, double rate_hz, std::int64_t start_ns);
  virtual ~PacedGenerator() = default;

  std::int64_t next_due() const;
  RawDatum produce();  // emits the datum due at next_due() and advances
  // Drops everything due at or before now_ns without producing it.
  void skip_until(std::int64_t now_ns);

  SensorId sensor_id() const { return id_; }
  double rate_hz() const { return rate_hz_; }
  std::uint64_t index() const { return index_; }

 protected:
  virtual RawDatum make(std::uint64_t index, std::int64_t due_ns) = 0;

 private:
  SensorId id_;
  double rate_hz_;
  std::int64_t start_ns_;
  std::uint64_t index_ = 0;
};

struct LidarSimConfig {
  double rotation_hz = 10.0;
  double azimuth_step_deg = 0.2;
  std::uint64_t seed = 1;
};

// 24 firing groups per packet: packets/s = rotation_hz * 360 / step / 24.
double lidar_packet_rate(const LidarSimConfig& config);

class LidarGenerator final : public PacedGenerator {
 public:
  LidarGenerator(SensorId id, LidarSimConfig config, std::int64_t start_ns);

  // Everything closer than 0.5 m: a blocked sensor window.
  void set_obstructed(bool on) { obstructed_.store(on); }

 protected:
  RawDatum make(std::uint64_t index, std::int64_t due_ns) override;

 private:
  LidarSimConfig config_;
  std::int64_t start_ns_;
  std::atomic<bool> obstructed_{false};
};

class ImuGenerator final : public PacedGenerator {
 public:
  // The profile repeats once its duration has elapsed.
  ImuGenerator(SensorId id, ImuSimulator sim, double rate_hz, std::int64_t start_ns);

 protected:
  RawDatum make(std::uint64_t index, std::int64_t due_ns) override;

 private:
  ImuSimulator sim_;
  std::int64_t start_ns_;
};

struct GnssSimConfig {
  double latitude_deg = 47.0;
  double longitude_deg = -71.1;
  double altitude_m = 670.0;
  int satellites = 12;
  int fix_quality = 1;
  double rate_hz = 1.0;
};

class GnssGenerator final : public PacedGenerator {
 public:
  GnssGenerator(SensorId id, GnssSimConfig config, std::int64_t start_ns,
                std::int64_t wall_offset_ns);

  void set_denied(bool on) { denied_.store(on); }

 protected:
  RawDatum make(std::uint64_t index, std::int64_t due_ns) override;

 private:
  GnssSimConfig config_;
  std::int64_t wall_offset_ns_;
  std::atomic<bool> denied_{false};
};

// Paces a generator on its own thread. pause() models an unplugged sensor:
// nothing is emitted and, on resume(), the backlog is skipped.
class SourceRunner {
 public:
  SourceRunner(std::unique_ptr<PacedGenerator> generator, DatumSink sink,
               const Clock& clock = SystemClock::instance());
  ~SourceRunner();

  SourceRunner(const SourceRunner&) = delete;
  SourceRunner& operator=(const SourceRunner&) = delete;

  void start();
  void stop();
  void pause();
  void resume();

  bool paused() const { return paused_.load(); }
  bool finished() const { return finished_.load(); }
  std::uint64_t emitted() const { return emitted_.load(); }
  PacedGenerator& generator() { return *generator_; }

 private:
  void loop(std::stop_token stop);

  std::unique_ptr<PacedGenerator> generator_;
  DatumSink sink_;
  const Clock& clock_;
  std::mutex gen_mu_;
  std::atomic<bool> paused_{false};
  std::atomic<bool> finished_{false};
  std::atomic<std::uint64_t> emitted_{0};
  std::jthread thread_;
};

// Drives a generator synchronously up to end_ns; the deterministic form of a
// source run. Returns the number of data handed to the sink.
std::uint64_t run_generator_until(PacedGenerator& generator, std::int64_t end_ns,
                                  const DatumSink& sink);

class CameraSource {
 public:
  CameraSource(SensorId id, CameraId side, CameraConfig config, std::uint64_t seed,
               DatumSink sink);
  ~CameraSource();

  CameraSource(const CameraSource&) = delete;
  CameraSource& operator=(const CameraSource&) = delete;

  void start();
  void stop();

  // Called from the trigger fan-out; never blocks.
  void on_trigger(const FrameTrigger& trigger);

  void pause() { paused_.store(true); }
  void resume() { paused_.store(false); }
  bool paused() const { return paused_.load(); }
  void set_temperature(float celsius) { temperature_.store(celsius); }
  float temperature() const { return temperature_.load(); }
  // Skip the next n triggers (a lost frame on one side of the pair).
  void drop_next(std::uint32_t n) { drop_next_.fetch_add(n); }

  std::uint64_t emitted() const { return emitted_.load(); }
  std::uint64_t missed_triggers() const { return missed_.load(); }
  CameraId side() const { return side_; }

 private:
  void loop(std::stop_token stop);

  SensorId id_;
  CameraId side_;
  CameraConfig config_;
  std::uint64_t seed_;
  DatumSink sink_;
  BoundedQueue<FrameTrigger> pending_{16};
  std::atomic<bool> paused_{false};
  std::atomic<float> temperature_{35.0f};
  std::atomic<std::uint32_t> drop_next_{0};
  std::atomic<std::uint64_t> emitted_{0};
  std::atomic<std::uint64_t> missed_{0};
  std::jthread thread_;
};

}  // namespace fieldpack::sim
