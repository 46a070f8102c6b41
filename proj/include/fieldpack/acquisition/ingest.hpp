// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// ingest.hpp -- stamping, per-sensor sequence numbers and ingest statistics.

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/common/clock.hpp"

namespace fieldpack::acq {

class DescriptorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DescriptorError naming the first offending sensor: duplicate id or
// name, non-positive rate, or a silence timeout not longer than one period.
void validate_descriptors(const std::vector<SensorDescriptor>& descriptors);

// Trailing-window rate and bandwidth estimate.
class RateMeter {
 public:
  explicit RateMeter(std::int64_t window_ns = kNsPerSec) : window_ns_(window_ns) {}

  void add(std::int64_t t_ns, std::uint64_t bytes);
  double rate_hz(std::int64_t now_ns);
  double bandwidth_bps(std::int64_t now_ns);
  void clear();

 private:
  void trim(std::int64_t now_ns);
  // The span actually covered: the full window once enough history exists.
  double span_s(std::int64_t now_ns) const;

  std::int64_t window_ns_;
  std::deque<std::pair<std::int64_t, std::uint64_t>> events_;
  std::uint64_t bytes_in_window_ = 0;
  std::optional<std::int64_t> first_ns_;
};

enum class DropReason { kQueueOverflow, kDiskFull, kNotRecording };

struct SensorStats {
  SensorId id = 0;
  std::string name;
  std::uint64_t ingested_count = 0;
  std::uint64_t recorded_count = 0;
  std::uint64_t dropped_count = 0;
  std::uint64_t bytes_in = 0;
  double measured_rate_hz = 0.0;
  double measured_bandwidth_bps = 0.0;
  std::uint64_t dropped_queue_overflow = 0;
  std::uint64_t dropped_disk_full = 0;
  std::uint64_t dropped_not_recording = 0;
};

using IngestStats = std::vector<SensorStats>;

class Ingestor {
 public:
  // Throws DescriptorError when the table is inconsistent.
  Ingestor(std::vector<SensorDescriptor> descriptors, const Clock& clock,
           std::int64_t rate_window_ns = kNsPerSec);

  // Stamps both clocks at arrival and assigns the sensor's next seq.
  // Unregistered sensors are rejected (nullopt) and counted separately.
  std::optional<StampedRecord> ingest(RawDatum&& datum);

  void note_recorded(SensorId id);
  void note_dropped(SensorId id, DropReason reason);

  // Counters in descriptor order; rates are measured over the trailing window.
  IngestStats stats() const;
  std::optional<SensorStats> stats_for(SensorId id) const;
  // Zeroes counters and rate windows; sequence numbers keep counting.
  void reset_stats();

  std::uint64_t rejected() const { return rejected_.load(); }
  const std::vector<SensorDescriptor>& descriptors() const { return descriptors_; }
  const SensorDescriptor* find(SensorId id) const;
  const SensorDescriptor* find(std::string_view name) const;
  const Clock& clock() const { return clock_; }

 private:
  struct Slot {
    explicit Slot(std::int64_t window_ns) : meter(window_ns) {}
    std::mutex mu;  // stamping, seq and the rate meter
    std::uint64_t next_seq = 0;
    std::int64_t last_mono = 0;
    RateMeter meter;
    std::atomic<std::uint64_t> ingested{0};
    std::atomic<std::uint64_t> recorded{0};
    std::atomic<std::uint64_t> bytes_in{0};
    std::atomic<std::uint64_t> dropped_overflow{0};
    std::atomic<std::uint64_t> dropped_disk{0};
    std::atomic<std::uint64_t> dropped_not_recording{0};
  };

  Slot* slot(SensorId id) const;
  SensorStats collect(std::size_t index) const;

  std::vector<SensorDescriptor> descriptors_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::array<int, 256> index_of_{};
  const Clock& clock_;
  std::atomic<std::uint64_t> rejected_{0};
};

}  // namespace fieldpack::acq
