// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// lidar_packet.hpp -- VLP-16-style 1206-byte data packet.
//
// Layout (all multi-byte fields little-endian):
//   12 x { u16 flag = 0xFFEE, u16 azimuth (0.01 deg), 32 x { u16 distance (2 mm), u8 reflectivity } }
//   u32 timestamp_us, 2 factory bytes
// Each block holds two 16-channel firing groups that share the block azimuth.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fieldpack/common/bytes.hpp"

namespace fieldpack::sim {

constexpr std::size_t kLidarPacketBytes = 1206;
constexpr std::size_t kLidarBlocks = 12;
constexpr std::size_t kLidarChannelsPerBlock = 32;
constexpr std::size_t kLidarLasers = 16;
constexpr std::size_t kLidarPointsPerPacket = kLidarBlocks * kLidarChannelsPerBlock;
constexpr std::uint16_t kLidarBlockFlag = 0xFFEE;
constexpr std::uint16_t kLidarAzimuthLimit = 36000;
constexpr double kLidarDistanceUnitM = 0.002;
constexpr std::array<std::uint8_t, 2> kLidarFactoryBytes{0x37, 0x22};

struct LidarChannel {
  std::uint16_t distance = 0;  // 2 mm units
  std::uint8_t reflectivity = 0;
  bool operator==(const LidarChannel&) const = default;
};

struct LidarBlock {
  std::uint16_t flag = kLidarBlockFlag;
  std::uint16_t azimuth = 0;  // hundredths of a degree
  std::vector<LidarChannel> channels = std::vector<LidarChannel>(kLidarChannelsPerBlock);
  bool operator==(const LidarBlock&) const = default;
};

struct LidarPoint {
  double azimuth_deg = 0.0;
  std::uint8_t channel_index = 0;  // 0..15
  std::uint8_t firing_group = 0;   // 0 or 1 within the block
  double range_m = 0.0;
  std::uint8_t reflectivity = 0;
  bool zero_return = false;
};

struct LidarDecoded {
  std::vector<LidarBlock> blocks;
  std::uint32_t timestamp_us = 0;
  std::array<std::uint8_t, 2> factory{};
};

class LidarFormatError : public std::runtime_error {
 public:
  enum class Kind { kBlockCount, kChannelCount, kAzimuthRange, kLength, kFlag };
  LidarFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Throws LidarFormatError on wrong block/channel count or out-of-range azimuth.
Bytes encode_lidar_packet(const std::vector<LidarBlock>& blocks, std::uint32_t timestamp_us);

// Structural decode; throws on length or flag errors.
LidarDecoded decode_lidar_packet(ByteView raw);

// 384 points per well-formed packet.
std::vector<LidarPoint> parse_lidar_packet(ByteView raw);

}  // namespace fieldpack::sim
