// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "fieldpack/sim/nmea.hpp"

using namespace fieldpack::sim;

namespace {

std::string xor_oracle(std::string_view body) {
  unsigned x = 0;
  for (unsigned char c : body) x ^= c;
  static const char* hex = "0123456789ABCDEF";
  return {hex[x >> 4], hex[x & 0xF]};
}

constexpr const char* kSample = "$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,*47";

}  // namespace

TEST_CASE("nmea_checksum") {
  const std::string body = "GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,";
  CHECK(xor_oracle(body) == "47");
  CHECK(nmea_checksum(body) == "47");
  CHECK(nmea_checksum("") == "00");
  CHECK(nmea_checksum("A") == "41");
}

TEST_CASE("parse GGA") {
  const GnssFix fix = parse_nmea_gga(kSample);
  CHECK(fix.latitude_deg == doctest::Approx(48.0 + 7.038 / 60.0).epsilon(1e-12));
  CHECK(fix.latitude_deg == doctest::Approx(48.1173).epsilon(1e-5));
  CHECK(fix.longitude_deg == doctest::Approx(11.5167).epsilon(1e-5));
  CHECK(fix.fix_quality == 1);
  CHECK(fix.satellites == 8);
  CHECK(fix.altitude_m == doctest::Approx(545.4));
  CHECK(fix.wall_time == UtcTime{12, 35, 19.0});
}

TEST_CASE("GGA errors and quality zero") {
  std::string bad = kSample;
  bad.back() = '8';
  try {
    parse_nmea_gga(bad);
    FAIL("expected checksum error");
  } catch (const NmeaError& e) {
    CHECK(e.kind() == NmeaError::Kind::kChecksum);
  }

  const std::string rmc_body = "GPRMC,123519,A,4807.038,N,01131.000,E,022.4,084.4,230394,003.1,W";
  try {
    parse_nmea_gga("$" + rmc_body + "*" + xor_oracle(rmc_body));
    FAIL("expected unsupported sentence");
  } catch (const NmeaError& e) {
    CHECK(e.kind() == NmeaError::Kind::kUnsupportedSentence);
  }

  const std::string nofix = "GPGGA,123519,4807.038,N,01131.000,E,0,00,0.9,545.4,M,46.9,M,,";
  const GnssFix fix = parse_nmea_gga("$" + nofix + "*" + xor_oracle(nofix) + "\r\n");
  CHECK(fix.fix_quality == 0);
}

TEST_CASE("southern and western hemispheres are negative") {
  GnssFix in;
  in.latitude_deg = -33.8688;
  in.longitude_deg = -151.2093;
  in.altitude_m = 12.5;
  in.fix_quality = 4;
  in.satellites = 17;
  in.wall_time = {23, 59, 58.5};
  const GnssFix out = parse_nmea_gga(format_nmea_gga(in));
  CHECK(out.latitude_deg == doctest::Approx(in.latitude_deg).epsilon(1e-6));
  CHECK(out.longitude_deg == doctest::Approx(in.longitude_deg).epsilon(1e-6));
  CHECK(out.fix_quality == 4);
  CHECK(out.satellites == 17);
  CHECK(out.wall_time == in.wall_time);
}

TEST_CASE("property: generated sentences validate; any single-byte mutation does not") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-89.9, 89.9), lon(-179.9, 179.9), alt(-100, 4000);
  for (int trial = 0; trial < 100; ++trial) {
    GnssFix f;
    f.latitude_deg = lat(rng);
    f.longitude_deg = lon(rng);
    f.altitude_m = alt(rng);
    f.fix_quality = static_cast<int>(rng() % 6);
    f.satellites = static_cast<int>(rng() % 30);
    const std::string s = format_nmea_gga(f);
    const auto star = s.find('*');
    CHECK(s.substr(star + 1) == xor_oracle(s.substr(1, star - 1)));
    CHECK_NOTHROW(parse_nmea_gga(s));

    // Mutate one body byte to a different printable character.
    const std::size_t pos = 1 + rng() % (star - 1);
    std::string m = s;
    char c = static_cast<char>(' ' + rng() % 90);
    if (c == m[pos]) c = static_cast<char>(c == 'Z' ? 'Y' : c + 1);
    m[pos] = c;
    CHECK_THROWS_AS(parse_nmea_gga(m), NmeaError);
  }
}

TEST_CASE("LineSplitter reassembles chunked input") {
  LineSplitter splitter;
  std::vector<std::string> lines;
  const std::string stream = "$A*41\r\n$GPGGA,1\n\npartial";
  for (char c : stream) {
    splitter.feed(std::string_view(&c, 1), [&](std::string_view l) { lines.emplace_back(l); });
  }
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "$A*41");
  CHECK(lines[1] == "$GPGGA,1");
  CHECK(lines[2].empty());
  CHECK(nmea_sentence_type("$GPGGA,1,2,3") == std::optional<std::string>("GGA"));
  CHECK(nmea_sentence_type("GPGGA") == std::nullopt);
}
