// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "fieldpack/budget/budget.hpp"
#include "json.hpp"

using namespace fieldpack::budget;

namespace {

RigTopology camera_rig(double uplink_mbps) {
  RigTopology t;
  t.nodes = {"cam_left", "cam_right", "switch", "computer", "lidar"};
  t.links = {{"cam_left_link", "cam_left", "switch", 1000},
             {"cam_right_link", "cam_right", "switch", 1000},
             {"uplink", "switch", "computer", uplink_mbps},
             {"lidar_link", "lidar", "computer", 100}};
  t.flows = {{"CAM_L", "cam_left", "computer", 872, {"cam_left_link", "uplink"}},
             {"CAM_R", "cam_right", "computer", 872, {"cam_right_link", "uplink"}},
             {"LIDAR", "lidar", "computer", 8, {"lidar_link"}}};
  return t;
}

const LinkReport& find(const std::vector<LinkReport>& r, const std::string& name) {
  for (const auto& l : r) {
    if (l.name == name) return l;
  }
  throw std::runtime_error("no link " + name);
}

}  // namespace

TEST_CASE("two 872 Mb/s cameras oversubscribe a 1 GbE uplink") {
  const auto r = link_utilization(camera_rig(1000));
  const auto& up = find(r, "uplink");
  CHECK(up.total_mbps == doctest::Approx(872.0 + 872.0));
  CHECK(up.utilization == doctest::Approx(1.744));
  CHECK(up.violating);
  CHECK(up.excess_mbps == doctest::Approx(744.0));
  CHECK(r.front().name == "uplink");
  CHECK_FALSE(find(r, "cam_left_link").violating);
  CHECK(find(r, "cam_left_link").utilization == doctest::Approx(0.872));
}

TEST_CASE("10 GbE uplink is not oversubscribed") {
  const auto r = link_utilization(camera_rig(10000));
  CHECK(find(r, "uplink").utilization == doctest::Approx(0.1744));
  for (const auto& l : r) CHECK_FALSE(l.violating);
  CHECK_FALSE(analyze(camera_rig(10000)).any_violation());
}

TEST_CASE("no flows gives zero utilization") {
  auto t = camera_rig(1000);
  t.flows.clear();
  for (const auto& l : link_utilization(t)) {
    CHECK(l.total_mbps == 0.0);
    CHECK(l.utilization == 0.0);
  }
}

TEST_CASE("violations are sorted by excess") {
  RigTopology t;
  t.nodes = {"a", "b", "c"};
  t.links = {{"ok", "a", "b", 1000}, {"small", "a", "c", 100}, {"big", "b", "c", 100}};
  t.flows = {{"f1", "a", "c", 150, {"small"}}, {"f2", "b", "c", 400, {"big"}}, {"f3", "a", "b", 10, {"ok"}}};
  const auto r = link_utilization(t);
  CHECK(r[0].name == "big");
  CHECK(r[1].name == "small");
  CHECK(r[2].name == "ok");
}

TEST_CASE("topology errors") {
  auto t = camera_rig(1000);
  t.flows[0].route = {"cam_left_link", "missing"};
  CHECK_THROWS_WITH_AS(link_utilization(t), doctest::Contains("undeclared link 'missing'"), TopologyError);
  t = camera_rig(1000);
  t.flows[0].route = {"uplink"};  // does not start at cam_left
  CHECK_THROWS_AS(link_utilization(t), TopologyError);
  t = camera_rig(1000);
  t.flows[0].route = {"cam_left_link"};  // stops at the switch
  CHECK_THROWS_AS(link_utilization(t), TopologyError);
  t = camera_rig(0);
  CHECK_THROWS_AS(link_utilization(t), TopologyError);
  t = camera_rig(1000);
  t.links[0].b = "nowhere";
  CHECK_THROWS_AS(link_utilization(t), TopologyError);
  // routes may traverse links in either direction
  t = camera_rig(1000);
  t.flows.push_back({"cmd", "computer", "cam_left", 1, {"uplink", "cam_left_link"}});
  CHECK_NOTHROW(link_utilization(t));
}

TEST_CASE("power and runtime") {
  CHECK(power_total({{"computer", 40}, {"switch", 12}, {"other", 27}}) == 79.0);
  CHECK(power_total({}) == 0.0);
  CHECK(power_total({{"x", 1.5}, {"y", 2.5}}) == 4.0);
  CHECK_THROWS_AS(power_total({{"x", -1}}), InputError);
  CHECK(battery_runtime(56, 2.5, 79) == doctest::Approx(56.0 * 2.5 / 79.0));
  CHECK(battery_runtime(56, 2.5, 79) == doctest::Approx(1.77).epsilon(0.005));
  CHECK(battery_runtime(56, 7.5, 79) == doctest::Approx(5.32).epsilon(0.005));
  CHECK(battery_runtime(56, 2.5, 140) == 1.0);
  CHECK_THROWS_AS(battery_runtime(56, 2.5, 0), InputError);
  CHECK_THROWS_AS(battery_runtime(0, 2.5, 10), InputError);
}

TEST_CASE("monotonicity and linearity") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = camera_rig(1000 + static_cast<double>(rng() % 9000));
    for (auto& f : t.flows) f.rate_mbps = static_cast<double>(rng() % 2000) / 2.0;
    const auto base = link_utilization(t);
    auto more = t;
    more.flows.push_back({"extra", "cam_right", "computer", 1.0 + static_cast<double>(rng() % 50),
                          {"cam_right_link", "uplink"}});
    const auto grown = link_utilization(more);
    for (const auto& l : base) CHECK(find(grown, l.name).utilization >= l.utilization);
    const double k = 0.5 + static_cast<double>(rng() % 40) / 10.0;
    auto scaled = t;
    for (auto& f : scaled.flows) f.rate_mbps *= k;
    const auto sr = link_utilization(scaled);
    for (const auto& l : base) CHECK(find(sr, l.name).utilization == doctest::Approx(l.utilization * k));
  }
  std::vector<PowerComponent> comps = {{"a", 3}, {"b", 4}, {"c", 5}};
  const double full = power_total(comps);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto less = comps;
    less.erase(less.begin() + static_cast<std::ptrdiff_t>(i));
    CHECK(power_total(less) <= full);
  }
}

TEST_CASE("report rendering") {
  auto t = camera_rig(1000);
  t.power = {{"computer", 40}, {"switch", 12}, {"other", 27}};
  t.batteries = {{"small", 56, 2.5}, {"large", 56, 7.5}};
  const auto r = analyze(t);
  CHECK(r.any_violation());
  const std::string table = format_table(r);
  CHECK(table.find("OVERSUBSCRIBED") != std::string::npos);
  CHECK(table.find("79.00 W") != std::string::npos);
  const auto j = nlohmann::json::parse(format_json(r));
  CHECK(j["violation"] == true);
  CHECK(j["power"]["total_w"] == 79.0);
  CHECK(j["batteries"][0]["runtime_h"].get<double>() == doctest::Approx(140.0 / 79.0));
  CHECK(j["links"][0]["name"] == "uplink");
}
