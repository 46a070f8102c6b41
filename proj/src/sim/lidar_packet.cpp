// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/lidar_packet.hpp"

#include <cstdio>
#include <string>

namespace fieldpack::sim {

namespace {
constexpr std::size_t kBlockBytes = 4 + kLidarChannelsPerBlock * 3;

std::string hex16(std::uint16_t v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", v);
  return buf;
}
}  // namespace

Bytes encode_lidar_packet(const std::vector<LidarBlock>& blocks, std::uint32_t timestamp_us) {
  if (blocks.size() != kLidarBlocks) {
    throw LidarFormatError(LidarFormatError::Kind::kBlockCount,
                           "lidar packet needs 12 blocks, got " + std::to_string(blocks.size()));
  }
  Bytes out;
  out.reserve(kLidarPacketBytes);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (block.channels.size() != kLidarChannelsPerBlock) {
      throw LidarFormatError(LidarFormatError::Kind::kChannelCount,
                             "block " + std::to_string(b) + " has " +
                                 std::to_string(block.channels.size()) + " channels, need 32");
    }
    if (block.azimuth >= kLidarAzimuthLimit) {
      throw LidarFormatError(LidarFormatError::Kind::kAzimuthRange,
                             "block " + std::to_string(b) + " azimuth " +
                                 std::to_string(block.azimuth) + " out of range");
    }
    put_u16le(out, kLidarBlockFlag);
    put_u16le(out, block.azimuth);
    for (const auto& ch : block.channels) {
      put_u16le(out, ch.distance);
      put_u8(out, ch.reflectivity);
    }
  }
  put_u32le(out, timestamp_us);
  out.insert(out.end(), kLidarFactoryBytes.begin(), kLidarFactoryBytes.end());
  return out;
}

LidarDecoded decode_lidar_packet(ByteView raw) {
  if (raw.size() != kLidarPacketBytes) {
    throw LidarFormatError(LidarFormatError::Kind::kLength,
                           "lidar packet length " + std::to_string(raw.size()) + ", expected 1206");
  }
  LidarDecoded out;
  out.blocks.resize(kLidarBlocks);
  for (std::size_t b = 0; b < kLidarBlocks; ++b) {
    const std::size_t base = b * kBlockBytes;
    const std::uint16_t flag = get_u16le(raw, base);
    if (flag != kLidarBlockFlag) {
      throw LidarFormatError(LidarFormatError::Kind::kFlag,
                             "block " + std::to_string(b) + " flag " + hex16(flag) +
                                 " is not 0xFFEE");
    }
    auto& block = out.blocks[b];
    block.flag = flag;
    block.azimuth = get_u16le(raw, base + 2);
    for (std::size_t c = 0; c < kLidarChannelsPerBlock; ++c) {
      const std::size_t at = base + 4 + c * 3;
      block.channels[c].distance = get_u16le(raw, at);
      block.channels[c].reflectivity = raw[at + 2];
    }
  }
  const std::size_t tail = kLidarBlocks * kBlockBytes;
  out.timestamp_us = get_u32le(raw, tail);
  out.factory = {raw[tail + 4], raw[tail + 5]};
  return out;
}

std::vector<LidarPoint> parse_lidar_packet(ByteView raw) {
  const LidarDecoded decoded = decode_lidar_packet(raw);
  std::vector<LidarPoint> points;
  points.reserve(kLidarPointsPerPacket);
  for (const auto& block : decoded.blocks) {
    const double azimuth_deg = block.azimuth / 100.0;
    for (std::size_t c = 0; c < kLidarChannelsPerBlock; ++c) {
      const auto& ch = block.channels[c];
      LidarPoint p;
      p.azimuth_deg = azimuth_deg;
      p.channel_index = static_cast<std::uint8_t>(c % kLidarLasers);
      p.firing_group = static_cast<std::uint8_t>(c / kLidarLasers);
      p.range_m = ch.distance * kLidarDistanceUnitM;
      p.reflectivity = ch.reflectivity;
      p.zero_return = ch.distance == 0;
      points.push_back(p);
    }
  }
  return points;
}

}  // namespace fieldpack::sim
