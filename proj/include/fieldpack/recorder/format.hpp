// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// format.hpp -- on-disk log format.
//
// Segment file:
//   header  "FPKLOG01" | u16 version | 16-byte session id          (26 bytes)
//   record* u8 sensor_id | u8 record_type | u32 payload_len |
//           u64 mono_ns | u64 wall_ns | payload | u32 crc          (22 + n + 4)
// Integers are little-endian. crc is CRC-32 (IEEE) over every preceding
// byte of the same record.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/common/bytes.hpp"

namespace fieldpack::rec {

constexpr std::string_view kMagic = "FPKLOG01";
constexpr std::uint16_t kFormatVersion = 1;
constexpr std::size_t kSegmentHeaderBytes = 8 + 2 + 16;
constexpr std::size_t kRecordHeaderBytes = 1 + 1 + 4 + 8 + 8;
constexpr std::size_t kRecordCrcBytes = 4;

constexpr std::size_t framed_size(std::size_t payload_len) {
  return kRecordHeaderBytes + payload_len + kRecordCrcBytes;
}

struct SessionId {
  std::array<std::uint8_t, 16> bytes{};

  static SessionId random();
  static std::optional<SessionId> from_hex(std::string_view hex);
  std::string hex() const;
  bool operator==(const SessionId&) const = default;
};

Bytes encode_segment_header(const SessionId& id);

struct SegmentHeader {
  std::uint16_t version = kFormatVersion;
  SessionId session;
};

class NotALogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws NotALogError on short input, bad magic or an unknown version.
SegmentHeader decode_segment_header(ByteView bytes);

// Appends the framed record to `out`.
void encode_record(const StampedRecord& record, Bytes& out);
Bytes encode_record(const StampedRecord& record);

}  // namespace fieldpack::rec
