// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// records.hpp -- sensor identity and the stamped record that flows from
// ingest to the recorder.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fieldpack/common/bytes.hpp"

namespace fieldpack {

using SensorId = std::uint8_t;

// Records that are not tied to one sensor (odometry, pairing dropouts).
constexpr SensorId kSystemSensorId = 0xFF;

enum class SensorKind : std::uint8_t { kCamera, kLidar, kImu, kGnss };

enum class RecordType : std::uint8_t { kFrame = 0, kLidarPacket = 1, kImu = 2, kGnss = 3, kEvent = 4 };

std::string_view to_string(SensorKind kind);
std::string_view to_string(RecordType type);
std::optional<SensorKind> parse_sensor_kind(std::string_view s);
std::optional<RecordType> record_type_from_u8(std::uint8_t v);
RecordType record_type_for(SensorKind kind);

struct SensorDescriptor {
  SensorId id = 0;
  std::string name;
  SensorKind kind = SensorKind::kCamera;
  double nominal_rate_hz = 0.0;
  double silence_timeout_ms = 0.0;
};

struct StampedRecord {
  SensorId sensor_id = 0;
  RecordType record_type = RecordType::kEvent;
  std::int64_t mono_ns = 0;
  std::int64_t wall_ns = 0;
  std::uint64_t seq = 0;  // per-sensor ingest counter; not stored on disk
  Bytes payload;

  bool operator==(const StampedRecord&) const = default;
};

// What a source hands to its ingest path before stamping.
struct RawDatum {
  SensorId sensor_id = 0;
  RecordType record_type = RecordType::kEvent;
  Bytes payload;
};

}  // namespace fieldpack
