// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include "doctest.h"
#include "fieldpack/trigger/trigger.hpp"

using namespace fieldpack;
using namespace fieldpack::trigger;

TEST_CASE("validate_config") {
  CHECK_FALSE(validate_config({10.0, 5000}).has_value());
  auto v = validate_config({10.0, 150000});
  REQUIRE(v.has_value());
  CHECK(v->kind == TriggerViolation::Kind::kExposureExceedsPeriod);
  CHECK(v->message.find("150000") != std::string::npos);
  // exposure equal to the period is still a violation
  CHECK(validate_config({10.0, 100000}).has_value());
  CHECK(validate_config({10.0, 99999}) == std::nullopt);
  auto z = validate_config({0.0, 5000});
  REQUIRE(z.has_value());
  CHECK(z->kind == TriggerViolation::Kind::kFpsNotPositive);
  CHECK(validate_config({-1.0, 5000})->kind == TriggerViolation::Kind::kFpsNotPositive);
  CHECK(validate_config({10.0, 0})->kind == TriggerViolation::Kind::kExposureNotPositive);
  CHECK_THROWS_AS(TriggerSchedule({10.0, 150000}, 0), std::invalid_argument);
}

TEST_CASE("schedule fires at exact period") {
  TriggerSchedule s({10.0, 5000}, 0);
  std::vector<TriggerEvent> ev;
  for (std::int64_t t = 0; t <= 200 * kNsPerMs; t += kNsPerMs) {
    while (auto e = s.next_event(t)) ev.push_back(*e);
  }
  REQUIRE(ev.size() == 3);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    CHECK(ev[i].seq == i);
    CHECK(ev[i].nominal_time == static_cast<std::int64_t>(i) * 100 * kNsPerMs);
    CHECK(ev[i].exposure_us == 5000);
  }
}

TEST_CASE("schedule reports not-yet before the next fire time") {
  TriggerSchedule s({10.0, 5000}, 1000);
  CHECK_FALSE(s.next_event(999).has_value());
  CHECK(s.next_event(1000).has_value());
  CHECK(s.next_fire_time() == 1000 + 100 * kNsPerMs);
  CHECK_FALSE(s.next_event(1000 + 100 * kNsPerMs - 1).has_value());
}

TEST_CASE("set_exposure effective-from follows a simulated trace") {
  TriggerSchedule s({10.0, 5000}, 0);
  std::vector<TriggerEvent> ev;
  auto run_until = [&](std::int64_t end) {
    for (std::int64_t t = 0; t <= end; t += kNsPerMs) {
      while (auto e = s.next_event(t)) ev.push_back(*e);
    }
  };
  run_until(250 * kNsPerMs);
  // Oracle: events fired so far are those with nominal time <= 250 ms.
  std::uint64_t fired = 0;
  for (std::int64_t n = 0; n * 100 <= 250; ++n) ++fired;
  REQUIRE(ev.size() == fired);
  auto change = s.set_exposure(8000);
  REQUIRE(change.effective_from.has_value());
  CHECK(*change.effective_from == fired);
  CHECK(*change.effective_from == 3);
  run_until(600 * kNsPerMs);
  for (const auto& e : ev) CHECK(e.exposure_us == (e.seq < 3 ? 5000u : 8000u));

  auto same = s.set_exposure(8000);
  CHECK(*same.effective_from == ev.size());

  auto bad = s.set_exposure(150000);
  CHECK_FALSE(bad.effective_from.has_value());
  REQUIRE(bad.violation.has_value());
  CHECK(s.config().exposure_us == 8000);
}

TEST_CASE("service broadcasts identical events to all subscribers") {
  TriggerService svc({50.0, 2000});
  std::mutex mu;
  std::vector<TriggerEvent> a, b;
  svc.subscribe([&](const TriggerEvent& e) {
    std::lock_guard l(mu);
    a.push_back(e);
  });
  svc.subscribe([&](const TriggerEvent& e) {
    std::lock_guard l(mu);
    b.push_back(e);
  });
  svc.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  auto ch = svc.set_exposure(3000);
  REQUIRE(ch.effective_from.has_value());
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  svc.stop();
  std::lock_guard l(mu);
  REQUIRE(a.size() >= 20);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seq == i);
    CHECK(b[i].seq == a[i].seq);
    CHECK(b[i].exposure_us == a[i].exposure_us);
    CHECK(a[i].fire_time >= a[i].nominal_time);
    CHECK(a[i].exposure_us == (a[i].seq < *ch.effective_from ? 2000u : 3000u));
    if (i > 0) CHECK(a[i].nominal_time - a[i - 1].nominal_time == 20 * kNsPerMs);
  }
  CHECK(svc.stats().fired == a.size());
}
