// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// preview.hpp -- 8-bit thumbnails for the operator console: downsampled
// camera frames and a top-down lidar occupancy image, encoded as PNG.

#pragma once

#include <cstdint>
#include <vector>

#include "fieldpack/common/bytes.hpp"
#include "fieldpack/sim/frame.hpp"

namespace fieldpack::api {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  double mean() const;
};

// Box-filters by the smallest integer factor that fits max_width and keeps
// the top 8 bits of each sample.
GrayImage camera_thumbnail(const sim::Frame& frame, std::uint32_t max_width);

// Square image centred on the sensor; each cell hit by a non-zero return
// within range_m is white.
GrayImage lidar_occupancy(const std::vector<Bytes>& packets, std::uint32_t size_px, double range_m);

Bytes encode_png(const GrayImage& image);  // throws std::runtime_error

}  // namespace fieldpack::api
