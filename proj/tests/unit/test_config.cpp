// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <string>

#include "doctest.h"
#include "fieldpack/budget/budget.hpp"
#include "fieldpack/config/config.hpp"
#include "temp_dir.hpp"

using namespace fieldpack;
using namespace fieldpack::config;

namespace {

const std::filesystem::path kConfigs = FIELDPACK_CONFIG_DIR;

const char* kMinimal = R"(
[[sensor]]
id = 3
name = "LIDAR"
kind = "lidar"
rate_hz = 750
silence_timeout_ms = 500
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped desk config") {
  const RigConfig c = load_config(kConfigs / "desk_sim.toml");
  REQUIRE(c.sensors.size() == 5);
  CHECK(c.sensors[0].name == "CAM_L");
  CHECK(c.camera(sim::CameraId::kLeft) == SensorId{1});
  CHECK(c.camera(sim::CameraId::kRight) == SensorId{2});
  CHECK(c.first_of(SensorKind::kImu) == SensorId{4});
  CHECK(c.trigger.fps == 10.0);
  CHECK(c.sim.camera.width == 320);
  CHECK(c.sim.imu_profile.kind == sim::MotionKind::kConstantTurn);
  CHECK(c.recorder.root == kConfigs / "../sessions");
  CHECK(c.api.port == 8080);
  CHECK(c.topology.flows.size() == 5);
  CHECK_NOTHROW(validate_for_run(c));
  CHECK_FALSE(budget::analyze(c.topology).any_violation());
}

TEST_CASE("shipped backpack rig configs") {
  const RigConfig one = load_config(kConfigs / "backpack_rig_1gbe.toml");
  const RigConfig ten = load_config(kConfigs / "backpack_rig_10gbe.toml");
  CHECK(budget::power_total(one.topology.power) == 79.0);
  REQUIRE(one.topology.batteries.size() == 2);
  CHECK(budget::analyze(one.topology).any_violation());
  CHECK_FALSE(budget::analyze(ten.topology).any_violation());
}

TEST_CASE("defaults when sections are absent") {
  const RigConfig c = parse_config(kMinimal, "/base");
  CHECK(c.sensors.size() == 1);
  CHECK(c.trigger.fps == 10.0);
  CHECK(c.thresholds.overheat_c == 75.0);
  CHECK(c.thresholds.clear_hold_ns == 2'000'000'000);
  CHECK(c.recorder.root == std::filesystem::path("/base/sessions"));
  CHECK(c.recorder.queue_capacity == 4096);
  CHECK(c.api.port == 8080);
  CHECK(c.topology.links.empty());
}

TEST_CASE("duplicate sensor ids name both sensors") {
  const std::string text = std::string(kMinimal) + R"(
[[sensor]]
id = 3
name = "GNSS"
kind = "gnss"
rate_hz = 1
silence_timeout_ms = 3000
)";
  const std::string e = error_of(text);
  CHECK(e.find("duplicate sensor id 3") != std::string::npos);
  CHECK(e.find("LIDAR") != std::string::npos);
  CHECK(e.find("GNSS") != std::string::npos);
}

TEST_CASE("invalid values are reported with their key") {
  CHECK(error_of(std::string(kMinimal) + "[trigger]\nfps = 10\nexposure_us = 150000\n").find("trigger") == 0);
  CHECK(error_of(std::string(kMinimal) + "[api]\nprot = 1\n").find("unknown key 'api.prot'") != std::string::npos);
  CHECK(error_of(std::string(kMinimal) + "[api]\nport = 70000\n").find("api.port") != std::string::npos);
  CHECK(error_of(std::string(kMinimal) + "[sim.imu]\nprofile = \"wobble\"\n").find("sim.imu.profile") !=
        std::string::npos);
  CHECK(error_of("[[sensor]]\nid = 1\nname = \"X\"\nkind = \"radar\"\nrate_hz = 1\nsilence_timeout_ms = 3000\n")
            .find("radar") != std::string::npos);
  CHECK(error_of("[[sensor]]\nid = 1\nname = \"C\"\nkind = \"camera\"\nrate_hz = 10\nsilence_timeout_ms = 500\n")
            .find("side") != std::string::npos);
  CHECK(error_of("[[sensor]]\nid = 1\nname = \"L\"\nkind = \"lidar\"\nrate_hz = 10\nsilence_timeout_ms = 50\n")
            .find("silence timeout") != std::string::npos);
  CHECK(error_of("name = [").find("line") == 0);
  CHECK_FALSE(error_of(std::string(kMinimal) + "[sim.imu]\naccel = [1, 2]\n").empty());
}

TEST_CASE("run validation") {
  CHECK_THROWS_AS(validate_for_run(parse_config("")), ConfigError);
  const std::string one_camera = R"(
[[sensor]]
id = 1
name = "CAM_L"
kind = "camera"
side = "left"
rate_hz = 10
silence_timeout_ms = 500
)";
  CHECK_THROWS_AS(validate_for_run(parse_config(one_camera)), ConfigError);
  CHECK_NOTHROW(validate_for_run(parse_config(kMinimal)));
}

TEST_CASE("missing file") {
  testutil::TempDir dir;
  CHECK_THROWS_AS(load_config(dir.path() / "nope.toml"), ConfigError);
}
