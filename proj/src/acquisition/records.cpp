// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/acquisition/records.hpp"

namespace fieldpack {

std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::kCamera: return "CAMERA";
    case SensorKind::kLidar: return "LIDAR";
    case SensorKind::kImu: return "IMU";
    case SensorKind::kGnss: return "GNSS";
  }
  return "?";
}

std::string_view to_string(RecordType type) {
  switch (type) {
    case RecordType::kFrame: return "FRAME";
    case RecordType::kLidarPacket: return "LIDAR_PKT";
    case RecordType::kImu: return "IMU";
    case RecordType::kGnss: return "GNSS";
    case RecordType::kEvent: return "EVENT";
  }
  return "?";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view s) {
  if (s == "CAMERA") return SensorKind::kCamera;
  if (s == "LIDAR") return SensorKind::kLidar;
  if (s == "IMU") return SensorKind::kImu;
  if (s == "GNSS") return SensorKind::kGnss;
  return std::nullopt;
}

std::optional<RecordType> record_type_from_u8(std::uint8_t v) {
  if (v > static_cast<std::uint8_t>(RecordType::kEvent)) return std::nullopt;
  return static_cast<RecordType>(v);
}

RecordType record_type_for(SensorKind kind) {
  switch (kind) {
    case SensorKind::kCamera: return RecordType::kFrame;
    case SensorKind::kLidar: return RecordType::kLidarPacket;
    case SensorKind::kImu: return RecordType::kImu;
    case SensorKind::kGnss: return RecordType::kGnss;
  }
  return RecordType::kEvent;
}

}  // namespace fieldpack
