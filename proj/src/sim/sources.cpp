// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/sources.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fieldpack::sim {

namespace {
constexpr std::int64_t kMaxSleepSliceNs = 20 * kNsPerMs;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

PacedGenerator::PacedGenerator(SensorId id, double rate_hz, std::int64_t start_ns)
    : id_(id), rate_hz_(rate_hz), start_ns_(start_ns) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("source rate must be positive");
}

std::int64_t PacedGenerator::next_due() const {
  return start_ns_ + static_cast<std::int64_t>(std::llround(static_cast<double>(index_) * 1e9 / rate_hz_));
}

RawDatum PacedGenerator::produce() {
  const std::int64_t due = next_due();
  RawDatum d = make(index_, due);
  ++index_;
  return d;
}

void PacedGenerator::skip_until(std::int64_t now_ns) {
  if (now_ns < next_due()) return;
  const double elapsed = static_cast<double>(now_ns - start_ns_) * rate_hz_ / 1e9;
  index_ = static_cast<std::uint64_t>(std::floor(elapsed)) + 1;
  while (next_due() <= now_ns) ++index_;
}

double lidar_packet_rate(const LidarSimConfig& config) {
  return config.rotation_hz * 360.0 / config.azimuth_step_deg / 24.0;
}

LidarGenerator::LidarGenerator(SensorId id, LidarSimConfig config, std::int64_t start_ns)
    : PacedGenerator(id, lidar_packet_rate(config), start_ns), config_(config), start_ns_(start_ns) {}

RawDatum LidarGenerator::make(std::uint64_t index, std::int64_t due_ns) {
  const bool blocked = obstructed_.load();
  const std::uint64_t step_cdeg = static_cast<std::uint64_t>(std::llround(config_.azimuth_step_deg * 100.0));
  std::vector<LidarBlock> blocks(kLidarBlocks);
  for (std::size_t b = 0; b < kLidarBlocks; ++b) {
    const std::uint64_t group = index * 24 + 2 * b;
    auto& block = blocks[b];
    block.azimuth = static_cast<std::uint16_t>((group * step_cdeg) % kLidarAzimuthLimit);
    const double az = block.azimuth / 100.0 * kPi / 180.0;
    for (std::size_t c = 0; c < kLidarChannelsPerBlock; ++c) {
      const double laser = static_cast<double>(c % kLidarLasers);
      double range = 6.0 + 2.5 * std::sin(3.0 * az + 0.2 * laser) + 0.05 * laser;
      if (blocked) range = 0.2;
      block.channels[c].distance = static_cast<std::uint16_t>(std::lround(range / kLidarDistanceUnitM));
      block.channels[c].reflectivity =
          static_cast<std::uint8_t>((block.azimuth / 10 + c * 7 + config_.seed) & 0xFF);
    }
  }
  const auto ts = static_cast<std::uint32_t>(((due_ns - start_ns_) / kNsPerUs) % 3'600'000'000LL);
  return RawDatum{sensor_id(), RecordType::kLidarPacket, encode_lidar_packet(blocks, ts)};
}

ImuGenerator::ImuGenerator(SensorId id, ImuSimulator sim, double rate_hz, std::int64_t start_ns)
    : PacedGenerator(id, rate_hz, start_ns), sim_(std::move(sim)), start_ns_(start_ns) {}

RawDatum ImuGenerator::make(std::uint64_t index, std::int64_t due_ns) {
  const double t = std::fmod(static_cast<double>(index) / rate_hz(), sim_.profile().duration_s);
  ImuSample s = sim_.sample(t, 0);
  s.mono_time = due_ns;
  return RawDatum{sensor_id(), RecordType::kImu, encode_imu_payload(s)};
}

GnssGenerator::GnssGenerator(SensorId id, GnssSimConfig config, std::int64_t start_ns,
                             std::int64_t wall_offset_ns)
    : PacedGenerator(id, config.rate_hz, start_ns), config_(config), wall_offset_ns_(wall_offset_ns) {}

RawDatum GnssGenerator::make(std::uint64_t index, std::int64_t due_ns) {
  GnssFix fix;
  fix.latitude_deg = config_.latitude_deg + 1e-6 * static_cast<double>(index % 100);
  fix.longitude_deg = config_.longitude_deg;
  fix.altitude_m = config_.altitude_m;
  fix.satellites = config_.satellites;
  fix.fix_quality = config_.fix_quality;
  if (denied_.load()) {
    fix.fix_quality = 0;
    fix.satellites = 0;
  }
  const std::int64_t wall = due_ns + wall_offset_ns_;
  const std::int64_t day_ns = ((wall % (86400 * kNsPerSec)) + 86400 * kNsPerSec) % (86400 * kNsPerSec);
  fix.wall_time.hours = static_cast<int>(day_ns / (3600 * kNsPerSec));
  fix.wall_time.minutes = static_cast<int>((day_ns / (60 * kNsPerSec)) % 60);
  fix.wall_time.seconds = static_cast<double>(day_ns % (60 * kNsPerSec)) / 1e9;
  // Keep "%05.2f" from rounding 59.996 up to 60.00.
  fix.wall_time.seconds = std::floor(fix.wall_time.seconds * 100.0) / 100.0;
  const std::string sentence = format_nmea_gga(fix);
  return RawDatum{sensor_id(), RecordType::kGnss, Bytes(sentence.begin(), sentence.end())};
}

std::uint64_t run_generator_until(PacedGenerator& generator, std::int64_t end_ns,
                                  const DatumSink& sink) {
  std::uint64_t n = 0;
  while (generator.next_due() < end_ns) {
    if (!sink(generator.produce())) break;
    ++n;
  }
  return n;
}

SourceRunner::SourceRunner(std::unique_ptr<PacedGenerator> generator, DatumSink sink,
                           const Clock& clock)
    : generator_(std::move(generator)), sink_(std::move(sink)), clock_(clock) {}

SourceRunner::~SourceRunner() { stop(); }

void SourceRunner::start() {
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void SourceRunner::stop() {
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

void SourceRunner::pause() { paused_.store(true); }

void SourceRunner::resume() {
  {
    std::lock_guard lock(gen_mu_);
    generator_->skip_until(clock_.mono_ns());
  }
  paused_.store(false);
}

void SourceRunner::loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    const std::int64_t now = clock_.mono_ns();
    std::int64_t due;
    {
      std::lock_guard lock(gen_mu_);
      if (paused_.load()) {
        generator_->skip_until(now);
      } else {
        // Emit everything that is due; a late wake-up catches up in a burst.
        while (generator_->next_due() <= now && !stop.stop_requested()) {
          if (!sink_(generator_->produce())) {
            finished_.store(true);
            return;
          }
          emitted_.fetch_add(1);
        }
      }
      due = generator_->next_due();
    }
    const std::int64_t wait = std::min(due - clock_.mono_ns(), kMaxSleepSliceNs);
    if (wait > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(wait));
  }
  finished_.store(true);
}

CameraSource::CameraSource(SensorId id, CameraId side, CameraConfig config, std::uint64_t seed,
                           DatumSink sink)
    : id_(id), side_(side), config_(config), seed_(seed), sink_(std::move(sink)) {}

CameraSource::~CameraSource() { stop(); }

void CameraSource::start() {
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void CameraSource::stop() {
  pending_.close();
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

void CameraSource::on_trigger(const FrameTrigger& trigger) {
  if (paused_.load()) return;
  std::uint32_t skip = drop_next_.load();
  while (skip > 0 && !drop_next_.compare_exchange_weak(skip, skip - 1)) {
  }
  if (skip > 0) {
    missed_.fetch_add(1);
    return;
  }
  if (pending_.try_push(trigger) != PushResult::kAccepted) missed_.fetch_add(1);
}

void CameraSource::loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    auto trig = pending_.pop_wait(std::chrono::milliseconds(50));
    if (!trig) {
      if (pending_.closed()) return;
      continue;
    }
    const Frame frame = synth_frame(*trig, side_, config_, seed_, temperature_.load());
    if (!sink_(RawDatum{id_, RecordType::kFrame, encode_frame_payload(frame)})) return;
    emitted_.fetch_add(1);
  }
}

}  // namespace fieldpack::sim
