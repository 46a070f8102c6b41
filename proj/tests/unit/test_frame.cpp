// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <random>

#include "doctest.h"
#include "fieldpack/sim/frame.hpp"

using namespace fieldpack;
using namespace fieldpack::sim;

namespace {

double mean_level(const Frame& f) {
  double sum = 0;
  const std::size_t n = std::size_t{f.width} * f.height;
  for (std::size_t i = 0; i < n; ++i) sum += sample_at(f, i);
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("synth_frame size, seq and determinism") {
  const CameraConfig cfg{320, 240, 12, 12};
  const Frame a = synth_frame({7, 5000}, CameraId::kLeft, cfg, 99);
  CHECK(a.pixels.size() == 115200);  // ceil(320*240*12/8)
  CHECK(a.pixels.size() == packed_size(320, 240, 12));
  CHECK(a.trigger_seq == 7);
  CHECK(a.exposure_us == 5000);

  const Frame b = synth_frame({7, 5000}, CameraId::kLeft, cfg, 99);
  CHECK(a.pixels == b.pixels);

  const Frame r = synth_frame({7, 5000}, CameraId::kRight, cfg, 99);
  CHECK(r.trigger_seq == 7);
  CHECK(r.pixels != a.pixels);
}

TEST_CASE("RIGHT is LEFT shifted by the disparity") {
  const CameraConfig cfg{64, 8, 12, 5};
  const Frame l = synth_frame({3, 5000}, CameraId::kLeft, cfg, 1);
  const Frame r = synth_frame({3, 5000}, CameraId::kRight, cfg, 1);
  for (std::uint32_t y = 0; y < cfg.height; ++y) {
    for (std::uint32_t x = 0; x + 5 < cfg.width; ++x) {
      CHECK(sample_at(r, y * cfg.width + x) == sample_at(l, y * cfg.width + x + 5));
    }
  }
}

TEST_CASE("packed size covers odd sample counts") {
  CHECK(packed_size(3, 1, 12) == 5);  // 36 bits
  CHECK(packed_size(1, 1, 12) == 2);
  CHECK(packed_size(10, 10, 8) == 100);
  CHECK(packed_size(10, 10, 16) == 200);
  CHECK_THROWS_AS(synth_frame({0, 1}, CameraId::kLeft, CameraConfig{4, 4, 10, 0}, 0),
                  std::invalid_argument);
}

TEST_CASE("property: packing round-trips for every supported depth") {
  std::mt19937 rng(3);
  for (std::uint32_t depth : {8u, 12u, 16u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + rng() % 257;
      std::vector<std::uint16_t> samples(n);
      for (auto& s : samples) s = static_cast<std::uint16_t>(rng() & ((1u << depth) - 1));
      Frame f;
      f.bit_depth = depth;
      f.width = static_cast<std::uint32_t>(n);
      f.height = 1;
      pack_samples(samples, depth, f.pixels);
      CHECK(f.pixels.size() == packed_size(f.width, 1, depth));
      for (std::size_t i = 0; i < n; ++i) CHECK(sample_at(f, i) == samples[i]);
    }
  }
}

TEST_CASE("longer exposure renders a brighter frame") {
  const CameraConfig cfg{160, 120, 12, 8};
  const double dark = mean_level(synth_frame({1, 2000}, CameraId::kLeft, cfg, 5));
  const double base = mean_level(synth_frame({1, 5000}, CameraId::kLeft, cfg, 5));
  const double bright = mean_level(synth_frame({1, 9000}, CameraId::kLeft, cfg, 5));
  CHECK(dark < base);
  CHECK(base < bright);
}

TEST_CASE("frame payload round-trip") {
  const Frame f = synth_frame({42, 3000}, CameraId::kRight, CameraConfig{33, 7, 12, 2}, 8, 81.5f);
  const Bytes payload = encode_frame_payload(f);
  CHECK(payload.size() == kFramePayloadHeaderBytes + f.pixels.size());
  const FrameHeader h = peek_frame_header(payload);
  CHECK(h.trigger_seq == 42);
  CHECK(h.camera_id == CameraId::kRight);
  CHECK(h.temperature_c == 81.5f);
  const Frame back = decode_frame_payload(payload);
  CHECK(back.pixels == f.pixels);
  CHECK(back.width == 33);
  CHECK(back.exposure_us == 3000);
  Bytes truncated(payload.begin(), payload.end() - 1);
  CHECK_THROWS_AS(decode_frame_payload(truncated), std::invalid_argument);
}
