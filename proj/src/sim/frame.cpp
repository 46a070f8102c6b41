// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/frame.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>
#include <vector>

namespace fieldpack::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_depth(std::uint32_t bit_depth) {
  if (bit_depth != 8 && bit_depth != 12 && bit_depth != 16) {
    throw std::invalid_argument("unsupported bit depth " + std::to_string(bit_depth));
  }
}

}  // namespace

std::string_view camera_name(CameraId id) { return id == CameraId::kLeft ? "LEFT" : "RIGHT"; }

std::size_t packed_size(std::uint32_t width, std::uint32_t height, std::uint32_t bit_depth) {
  const std::uint64_t bits = std::uint64_t{width} * height * bit_depth;
  return static_cast<std::size_t>((bits + 7) / 8);
}

void pack_samples(std::span<const std::uint16_t> samples, std::uint32_t bit_depth, Bytes& out) {
  check_depth(bit_depth);
  out.assign(packed_size(static_cast<std::uint32_t>(samples.size()), 1, bit_depth), 0);
  switch (bit_depth) {
    case 8:
      for (std::size_t i = 0; i < samples.size(); ++i) out[i] = static_cast<std::uint8_t>(samples[i]);
      break;
    case 16:
      for (std::size_t i = 0; i < samples.size(); ++i) {
        out[2 * i] = static_cast<std::uint8_t>(samples[i] & 0xFF);
        out[2 * i + 1] = static_cast<std::uint8_t>(samples[i] >> 8);
      }
      break;
    default:  // 12: s0 low byte | s0 high nibble + s1 low nibble | s1 high byte
      for (std::size_t i = 0; i < samples.size(); i += 2) {
        const std::size_t at = (i / 2) * 3;
        const std::uint16_t s0 = samples[i] & 0x0FFF;
        out[at] = static_cast<std::uint8_t>(s0 & 0xFF);
        if (i + 1 < samples.size()) {
          const std::uint16_t s1 = samples[i + 1] & 0x0FFF;
          out[at + 1] = static_cast<std::uint8_t>((s0 >> 8) | ((s1 & 0x0F) << 4));
          out[at + 2] = static_cast<std::uint8_t>(s1 >> 4);
        } else {
          out[at + 1] = static_cast<std::uint8_t>(s0 >> 8);
        }
      }
      break;
  }
}

std::uint16_t sample_at(const Frame& frame, std::size_t index) {
  switch (frame.bit_depth) {
    case 8:
      return frame.pixels[index];
    case 16:
      return static_cast<std::uint16_t>(frame.pixels[2 * index] | (frame.pixels[2 * index + 1] << 8));
    default: {
      const std::size_t at = (index / 2) * 3;
      if (index % 2 == 0) {
        return static_cast<std::uint16_t>(frame.pixels[at] | ((frame.pixels[at + 1] & 0x0F) << 8));
      }
      return static_cast<std::uint16_t>((frame.pixels[at + 1] >> 4) | (frame.pixels[at + 2] << 4));
    }
  }
}

Frame synth_frame(const FrameTrigger& trigger, CameraId camera, const CameraConfig& config,
                  std::uint64_t seed, float temperature_c) {
  check_depth(config.bit_depth);
  if (config.width == 0 || config.height == 0) {
    throw std::invalid_argument("camera width and height must be non-zero");
  }
  Frame frame;
  frame.camera_id = camera;
  frame.trigger_seq = trigger.seq;
  frame.width = config.width;
  frame.height = config.height;
  frame.bit_depth = config.bit_depth;
  frame.exposure_us = trigger.exposure_us;
  frame.temperature_c = temperature_c;

  // The scene is rendered in the 12-bit domain and rescaled to the target depth.
  const std::int64_t shift = camera == CameraId::kRight ? config.disparity_px : 0;
  const double gain = static_cast<double>(trigger.exposure_us) / kReferenceExposureUs;
  const std::uint32_t max_out = (1u << config.bit_depth) - 1;
  std::vector<std::uint16_t> samples(std::size_t{config.width} * config.height);
  const std::uint64_t frame_key = splitmix64(seed ^ splitmix64(trigger.seq));
  for (std::uint32_t y = 0; y < config.height; ++y) {
    for (std::uint32_t x = 0; x < config.width; ++x) {
      const std::int64_t xw = static_cast<std::int64_t>(x) + shift;
      const std::uint64_t gradient =
          static_cast<std::uint64_t>((xw * 6 + std::int64_t{y} * 3 + static_cast<std::int64_t>(trigger.seq) * 16) & 0x7FF);
      const std::uint64_t noise =
          splitmix64(frame_key ^ (static_cast<std::uint64_t>(xw) << 32) ^ y) & 0xFF;
      const double v12 = std::min(4095.0, static_cast<double>(gradient + noise) * gain);
      const double scaled = v12 * max_out / 4095.0;
      samples[std::size_t{y} * config.width + x] =
          static_cast<std::uint16_t>(std::min<double>(max_out, scaled + 0.5));
    }
  }
  pack_samples(samples, config.bit_depth, frame.pixels);
  return frame;
}

Bytes encode_frame_payload(const Frame& frame) {
  Bytes out;
  out.reserve(kFramePayloadHeaderBytes + frame.pixels.size());
  put_u8(out, static_cast<std::uint8_t>(frame.camera_id));
  put_u64le(out, frame.trigger_seq);
  put_u32le(out, frame.width);
  put_u32le(out, frame.height);
  put_u8(out, static_cast<std::uint8_t>(frame.bit_depth));
  put_u32le(out, frame.exposure_us);
  put_u32le(out, std::bit_cast<std::uint32_t>(frame.temperature_c));
  put_u64le(out, 0);
  out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
  return out;
}

FrameHeader peek_frame_header(ByteView payload) {
  if (payload.size() < kFramePayloadHeaderBytes) {
    throw std::invalid_argument("frame payload shorter than its header");
  }
  FrameHeader h;
  if (payload[0] > 1) throw std::invalid_argument("bad camera id in frame payload");
  h.camera_id = static_cast<CameraId>(payload[0]);
  h.trigger_seq = get_u64le(payload, 1);
  h.width = get_u32le(payload, 9);
  h.height = get_u32le(payload, 13);
  h.bit_depth = payload[17];
  h.exposure_us = get_u32le(payload, 18);
  h.temperature_c = std::bit_cast<float>(get_u32le(payload, 22));
  return h;
}

Frame decode_frame_payload(ByteView payload) {
  const FrameHeader h = peek_frame_header(payload);
  check_depth(h.bit_depth);
  const std::size_t expected = packed_size(h.width, h.height, h.bit_depth);
  if (payload.size() != kFramePayloadHeaderBytes + expected) {
    throw std::invalid_argument("frame payload size does not match its dimensions");
  }
  Frame f;
  f.camera_id = h.camera_id;
  f.trigger_seq = h.trigger_seq;
  f.width = h.width;
  f.height = h.height;
  f.bit_depth = h.bit_depth;
  f.exposure_us = h.exposure_us;
  f.temperature_c = h.temperature_c;
  f.pixels.assign(payload.begin() + kFramePayloadHeaderBytes, payload.end());
  return f;
}

}  // namespace fieldpack::sim
