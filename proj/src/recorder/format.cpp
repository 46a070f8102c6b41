// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/recorder/format.hpp"

#include <algorithm>
#include <random>

namespace fieldpack::rec {

SessionId SessionId::random() {
  std::random_device rd;
  std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  SessionId id;
  for (auto& b : id.bytes) b = static_cast<std::uint8_t>(rng());
  return id;
}

std::optional<SessionId> SessionId::from_hex(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  SessionId id;
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    id.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return id;
}

std::string SessionId::hex() const { return to_hex(bytes); }

Bytes encode_segment_header(const SessionId& id) {
  Bytes out(kMagic.begin(), kMagic.end());
  put_u16le(out, kFormatVersion);
  out.insert(out.end(), id.bytes.begin(), id.bytes.end());
  return out;
}

SegmentHeader decode_segment_header(ByteView bytes) {
  if (bytes.size() < kSegmentHeaderBytes) {
    throw NotALogError("file too short for a segment header");
  }
  if (std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
    throw NotALogError("bad magic, not a fieldpack log");
  }
  SegmentHeader h;
  h.version = get_u16le(bytes, 8);
  if (h.version != kFormatVersion) {
    throw NotALogError("unsupported log format version " + std::to_string(h.version));
  }
  std::copy_n(bytes.begin() + 10, 16, h.session.bytes.begin());
  return h;
}

void encode_record(const StampedRecord& record, Bytes& out) {
  const std::size_t start = out.size();
  out.reserve(start + framed_size(record.payload.size()));
  put_u8(out, record.sensor_id);
  put_u8(out, static_cast<std::uint8_t>(record.record_type));
  put_u32le(out, static_cast<std::uint32_t>(record.payload.size()));
  put_u64le(out, static_cast<std::uint64_t>(record.mono_ns));
  put_u64le(out, static_cast<std::uint64_t>(record.wall_ns));
  out.insert(out.end(), record.payload.begin(), record.payload.end());
  const std::uint32_t crc = crc32_ieee(ByteView(out).subspan(start));
  put_u32le(out, crc);
}

Bytes encode_record(const StampedRecord& record) {
  Bytes out;
  encode_record(record, out);
  return out;
}

}  // namespace fieldpack::rec
