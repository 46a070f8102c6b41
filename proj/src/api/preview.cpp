// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/api/preview.hpp"

#include <png.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fieldpack/sim/lidar_packet.hpp"

namespace fieldpack::api {

double GrayImage::mean() const {
  if (pixels.empty()) return 0.0;
  const double sum = std::accumulate(pixels.begin(), pixels.end(), 0.0);
  return sum / static_cast<double>(pixels.size());
}

GrayImage camera_thumbnail(const sim::Frame& frame, std::uint32_t max_width) {
  if (frame.width == 0 || frame.height == 0 || max_width == 0) return {};
  const std::uint32_t f = (frame.width + max_width - 1) / max_width;
  GrayImage out;
  out.width = frame.width / f;
  out.height = frame.height / f;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
  const unsigned shift = frame.bit_depth > 8 ? frame.bit_depth - 8 : 0;
  for (std::uint32_t y = 0; y < out.height; ++y) {
    for (std::uint32_t x = 0; x < out.width; ++x) {
      std::uint64_t sum = 0;
      for (std::uint32_t dy = 0; dy < f; ++dy) {
        for (std::uint32_t dx = 0; dx < f; ++dx) {
          const std::size_t i = static_cast<std::size_t>(y * f + dy) * frame.width + x * f + dx;
          sum += sim::sample_at(frame, i) >> shift;
        }
      }
      out.pixels[static_cast<std::size_t>(y) * out.width + x] = static_cast<std::uint8_t>(sum / (f * f));
    }
  }
  return out;
}

GrayImage lidar_occupancy(const std::vector<Bytes>& packets, std::uint32_t size_px, double range_m) {
  GrayImage out;
  out.width = size_px;
  out.height = size_px;
  out.pixels.assign(static_cast<std::size_t>(size_px) * size_px, 0);
  const double scale = size_px / (2.0 * range_m);
  for (const auto& p : packets) {
    std::vector<sim::LidarPoint> points;
    try {
      points = sim::parse_lidar_packet(p);
    } catch (const std::exception&) {
      continue;
    }
    for (const auto& pt : points) {
      if (pt.zero_return || pt.range_m > range_m) continue;
      const double a = pt.azimuth_deg * M_PI / 180.0;
      const auto cx = static_cast<std::int64_t>(std::floor(size_px / 2.0 + pt.range_m * std::sin(a) * scale));
      const auto cy = static_cast<std::int64_t>(std::floor(size_px / 2.0 - pt.range_m * std::cos(a) * scale));
      if (cx < 0 || cy < 0 || cx >= size_px || cy >= size_px) continue;
      out.pixels[static_cast<std::size_t>(cy) * size_px + static_cast<std::size_t>(cx)] = 255;
    }
  }
  return out;
}

namespace {

void append_png(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

}  // namespace

Bytes encode_png(const GrayImage& image) {
  if (image.width == 0 || image.height == 0) throw std::runtime_error("cannot encode an empty image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  Bytes out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw std::runtime_error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_png, nullptr);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(y) * image.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace fieldpack::api
