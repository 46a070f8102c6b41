// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/nmea.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace fieldpack::sim {

namespace {

std::vector<std::string_view> split_fields(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = body.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(body.substr(start));
      break;
    }
    out.push_back(body.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, const char* what) {
  if (s.empty()) throw NmeaError(NmeaError::Kind::kField, std::string("empty ") + what);
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
    throw NmeaError(NmeaError::Kind::kField, std::string("bad ") + what + " '" + tmp + "'");
  }
  return v;
}

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw NmeaError(NmeaError::Kind::kField, std::string("bad ") + what + " '" +
                                                 std::string(s) + "'");
  }
  return v;
}

// ddmm.mmmm (lat) / dddmm.mmmm (lon) to signed decimal degrees.
double parse_coordinate(std::string_view value, std::string_view hemisphere, int deg_digits,
                        const char* what) {
  if (value.size() < static_cast<std::size_t>(deg_digits)) {
    throw NmeaError(NmeaError::Kind::kField, std::string("short ") + what);
  }
  const int degrees = parse_int(value.substr(0, deg_digits), what);
  const double minutes = parse_double(value.substr(deg_digits), what);
  if (minutes < 0.0 || minutes >= 60.0) {
    throw NmeaError(NmeaError::Kind::kField, std::string("minutes out of range in ") + what);
  }
  double deg = degrees + minutes / 60.0;
  if (hemisphere == "S" || hemisphere == "W") {
    deg = -deg;
  } else if (hemisphere != "N" && hemisphere != "E") {
    throw NmeaError(NmeaError::Kind::kField, std::string("bad hemisphere for ") + what);
  }
  return deg;
}

std::string format_coordinate(double deg, int deg_digits) {
  const double a = std::fabs(deg);
  int whole = static_cast<int>(a);
  double minutes = (a - whole) * 60.0;
  // Rounding to 0.001' can carry into the next degree.
  if (std::round(minutes * 1000.0) >= 60000.0) {
    minutes = 0.0;
    ++whole;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d%06.3f", deg_digits, whole, minutes);
  return buf;
}

}  // namespace

std::string nmea_checksum(std::string_view body) {
  std::uint8_t x = 0;
  for (char c : body) x ^= static_cast<std::uint8_t>(c);
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02X", x);
  return buf;
}

std::optional<std::string> nmea_sentence_type(std::string_view sentence) {
  if (sentence.size() < 7 || sentence[0] != '$') return std::nullopt;
  const std::size_t comma = sentence.find(',');
  if (comma == std::string_view::npos || comma < 4) return std::nullopt;
  // Talker ids are two characters ("GP", "GN", ...); the type follows.
  return std::string(sentence.substr(3, comma - 3));
}

GnssFix parse_nmea_gga(std::string_view sentence) {
  while (!sentence.empty() && (sentence.back() == '\n' || sentence.back() == '\r')) {
    sentence.remove_suffix(1);
  }
  if (sentence.empty() || sentence.front() != '$') {
    throw NmeaError(NmeaError::Kind::kFraming, "sentence does not start with '$'");
  }
  const std::size_t star = sentence.rfind('*');
  if (star == std::string_view::npos || sentence.size() - star != 3) {
    throw NmeaError(NmeaError::Kind::kFraming, "missing '*XX' checksum suffix");
  }
  const std::string_view body = sentence.substr(1, star - 1);
  const std::string_view given = sentence.substr(star + 1);
  if (nmea_checksum(body) != given) {
    throw NmeaError(NmeaError::Kind::kChecksum, "checksum mismatch: computed " +
                                                    nmea_checksum(body) + ", sentence has " +
                                                    std::string(given));
  }
  const auto fields = split_fields(body);
  if (fields[0].size() != 5 || fields[0].substr(2) != "GGA") {
    throw NmeaError(NmeaError::Kind::kUnsupportedSentence,
                    "unsupported sentence '" + std::string(fields[0]) + "'");
  }
  if (fields.size() < 15) {
    throw NmeaError(NmeaError::Kind::kField, "GGA needs 15 fields, got " +
                                                 std::to_string(fields.size()));
  }
  GnssFix fix;
  const std::string_view time = fields[1];
  if (time.size() >= 6) {
    fix.wall_time.hours = parse_int(time.substr(0, 2), "hours");
    fix.wall_time.minutes = parse_int(time.substr(2, 2), "minutes");
    fix.wall_time.seconds = parse_double(time.substr(4), "seconds");
  } else if (!time.empty()) {
    throw NmeaError(NmeaError::Kind::kField, "bad UTC time");
  }
  fix.fix_quality = parse_int(fields[6], "fix quality");
  if (fix.fix_quality < 0) throw NmeaError(NmeaError::Kind::kField, "negative fix quality");
  // Receivers without a fix leave position fields empty.
  if (!fields[2].empty()) {
    fix.latitude_deg = parse_coordinate(fields[2], fields[3], 2, "latitude");
    fix.longitude_deg = parse_coordinate(fields[4], fields[5], 3, "longitude");
  }
  fix.satellites = fields[7].empty() ? 0 : parse_int(fields[7], "satellites");
  fix.altitude_m = fields[9].empty() ? 0.0 : parse_double(fields[9], "altitude");
  if (std::fabs(fix.latitude_deg) > 90.0 || std::fabs(fix.longitude_deg) > 180.0) {
    throw NmeaError(NmeaError::Kind::kField, "coordinate out of range");
  }
  return fix;
}

std::string format_nmea_gga(const GnssFix& fix) {
  char time[16];
  std::snprintf(time, sizeof time, "%02d%02d%05.2f", fix.wall_time.hours, fix.wall_time.minutes,
                fix.wall_time.seconds);
  char body[160];
  std::snprintf(body, sizeof body, "GPGGA,%s,%s,%c,%s,%c,%d,%02d,0.9,%.1f,M,0.0,M,,", time,
                format_coordinate(fix.latitude_deg, 2).c_str(), fix.latitude_deg < 0 ? 'S' : 'N',
                format_coordinate(fix.longitude_deg, 3).c_str(),
                fix.longitude_deg < 0 ? 'W' : 'E', fix.fix_quality, fix.satellites,
                fix.altitude_m);
  return std::string("$") + body + "*" + nmea_checksum(body);
}

void LineSplitter::feed(std::string_view chunk,
                        const std::function<void(std::string_view)>& on_line) {
  for (char c : chunk) {
    if (c == '\n') {
      if (!discarding_) {
        std::string_view line(pending_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        on_line(line);
      }
      pending_.clear();
      discarding_ = false;
      continue;
    }
    if (discarding_) continue;
    if (pending_.size() >= max_line_) {
      pending_.clear();
      discarding_ = true;
      ++overlong_;
      continue;
    }
    pending_.push_back(c);
  }
}

}  // namespace fieldpack::sim
