// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// state_machine.hpp -- the per-sensor five-state machine.
//
//   OFF  --start_ok-->      IDLE     OFF --start_fail--> ERR
//   IDLE --record_on-->     REC      REC --record_off--> IDLE
//   IDLE --cal_start-->     CAL      (IMU only)
//   CAL  --cal_done-->      IDLE
//   IDLE|REC|CAL --fault--> ERR      ERR --fault_cleared--> IDLE
//   any  --stop-->          OFF
//
// Every other (state, event) pair is rejected and leaves the state alone.

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "fieldpack/acquisition/records.hpp"

namespace fieldpack::health {

enum class SensorState : std::uint8_t { kOff, kIdle, kRec, kErr, kCal };

enum class HealthEvent : std::uint8_t {
  kStartOk,
  kStartFail,
  kRecordOn,
  kRecordOff,
  kCalStart,
  kCalDone,
  kFault,
  kFaultCleared,
  kStop,
};

inline constexpr std::array kAllStates = {SensorState::kOff, SensorState::kIdle, SensorState::kRec,
                                          SensorState::kErr, SensorState::kCal};
inline constexpr std::array kAllEvents = {
    HealthEvent::kStartOk,  HealthEvent::kStartFail, HealthEvent::kRecordOn,
    HealthEvent::kRecordOff, HealthEvent::kCalStart, HealthEvent::kCalDone,
    HealthEvent::kFault,    HealthEvent::kFaultCleared, HealthEvent::kStop};

std::string_view to_string(SensorState s);
std::string_view to_string(HealthEvent e);
std::optional<SensorState> parse_state(std::string_view s);

// nullopt means rejected.
std::optional<SensorState> transition(SensorState current, HealthEvent event, SensorKind kind);

}  // namespace fieldpack::health
