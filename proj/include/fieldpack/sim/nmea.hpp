// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// nmea.hpp -- NMEA-0183 checksum, GGA parse/format, and a newline splitter
// for byte streams.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fieldpack::sim {

struct UtcTime {
  int hours = 0;
  int minutes = 0;
  double seconds = 0.0;
  bool operator==(const UtcTime&) const = default;
};

struct GnssFix {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;
  int fix_quality = 0;  // 0 = no fix
  int satellites = 0;
  UtcTime wall_time;
};

class NmeaError : public std::runtime_error {
 public:
  enum class Kind { kFraming, kChecksum, kUnsupportedSentence, kField };
  NmeaError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// XOR of all body bytes as two uppercase hex digits.
std::string nmea_checksum(std::string_view body);

// Accepts the sentence with or without a trailing CR/LF.
GnssFix parse_nmea_gga(std::string_view sentence);

// "$<body>*XX" (no line terminator). hdop is fixed at 0.9.
std::string format_nmea_gga(const GnssFix& fix);

// Sentence type such as "GGA" from "$GPGGA,..."; nullopt if not framed.
std::optional<std::string> nmea_sentence_type(std::string_view sentence);

// Splits an arbitrary chunked byte stream into newline-terminated lines.
class LineSplitter {
 public:
  explicit LineSplitter(std::size_t max_line = 512) : max_line_(max_line) {}

  // Invokes on_line for every complete line (terminator stripped, CR removed).
  void feed(std::string_view chunk, const std::function<void(std::string_view)>& on_line);

  std::size_t overlong_discarded() const { return overlong_; }

 private:
  std::size_t max_line_;
  std::string pending_;
  bool discarding_ = false;
  std::size_t overlong_ = 0;
};

}  // namespace fieldpack::sim
