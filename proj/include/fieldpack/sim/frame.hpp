// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// frame.hpp -- synthetic triggered camera frames and packed pixel buffers.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "fieldpack/common/bytes.hpp"

namespace fieldpack::sim {

enum class CameraId : std::uint8_t { kLeft = 0, kRight = 1 };

std::string_view camera_name(CameraId id);

struct CameraConfig {
  std::uint32_t width = 320;
  std::uint32_t height = 240;
  std::uint32_t bit_depth = 12;   // 8, 12 (two samples per 3 bytes) or 16 (LE)
  std::int32_t disparity_px = 12;  // horizontal shift applied to RIGHT
};

struct Frame {
  CameraId camera_id = CameraId::kLeft;
  std::uint64_t trigger_seq = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bit_depth = 12;
  Bytes pixels;
  std::uint32_t exposure_us = 0;
  float temperature_c = 0.0f;
};

// The subset of a trigger event a camera needs.
struct FrameTrigger {
  std::uint64_t seq = 0;
  std::uint32_t exposure_us = 0;
};

// Exposure at which the synthetic scene is rendered unscaled.
constexpr std::uint32_t kReferenceExposureUs = 5000;

// ceil(width * height * bit_depth / 8)
std::size_t packed_size(std::uint32_t width, std::uint32_t height, std::uint32_t bit_depth);

// Throws std::invalid_argument for unsupported bit depths or a zero dimension.
Frame synth_frame(const FrameTrigger& trigger, CameraId camera, const CameraConfig& config,
                  std::uint64_t seed, float temperature_c = 35.0f);

// Sample access on a packed buffer.
std::uint16_t sample_at(const Frame& frame, std::size_t index);
void pack_samples(std::span<const std::uint16_t> samples, std::uint32_t bit_depth, Bytes& out);

// Frame record payload: fixed 34-byte header followed by packed pixels.
//   u8 camera_id, u64 trigger_seq, u32 width, u32 height, u8 bit_depth,
//   u32 exposure_us, f32 temperature_c (bit pattern), u64 reserved
constexpr std::size_t kFramePayloadHeaderBytes = 34;

struct FrameHeader {
  CameraId camera_id = CameraId::kLeft;
  std::uint64_t trigger_seq = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bit_depth = 0;
  std::uint32_t exposure_us = 0;
  float temperature_c = 0.0f;
};

Bytes encode_frame_payload(const Frame& frame);
FrameHeader peek_frame_header(ByteView payload);  // throws std::invalid_argument
Frame decode_frame_payload(ByteView payload);     // throws std::invalid_argument

}  // namespace fieldpack::sim
