// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/common/bytes.hpp"

#include <zlib.h>

#include <algorithm>

namespace fieldpack {

std::uint32_t crc32_ieee_update(std::uint32_t crc, ByteView data) {
  // zlib takes uInt lengths; feed in chunks so huge payloads stay correct.
  constexpr std::size_t kChunk = 1u << 30;
  std::size_t off = 0;
  uLong c = crc;
  while (off < data.size()) {
    const std::size_t n = std::min(kChunk, data.size() - off);
    c = ::crc32(c, data.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

std::uint32_t crc32_ieee(ByteView data) { return crc32_ieee_update(0, data); }

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

}  // namespace fieldpack
