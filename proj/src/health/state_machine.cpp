// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/health/state_machine.hpp"

namespace fieldpack::health {

std::string_view to_string(SensorState s) {
  switch (s) {
    case SensorState::kOff: return "OFF";
    case SensorState::kIdle: return "IDLE";
    case SensorState::kRec: return "REC";
    case SensorState::kErr: return "ERR";
    case SensorState::kCal: return "CAL";
  }
  return "?";
}

std::string_view to_string(HealthEvent e) {
  switch (e) {
    case HealthEvent::kStartOk: return "start_ok";
    case HealthEvent::kStartFail: return "start_fail";
    case HealthEvent::kRecordOn: return "record_on";
    case HealthEvent::kRecordOff: return "record_off";
    case HealthEvent::kCalStart: return "cal_start";
    case HealthEvent::kCalDone: return "cal_done";
    case HealthEvent::kFault: return "fault";
    case HealthEvent::kFaultCleared: return "fault_cleared";
    case HealthEvent::kStop: return "stop";
  }
  return "?";
}

std::optional<SensorState> parse_state(std::string_view s) {
  for (auto st : kAllStates) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

std::optional<SensorState> transition(SensorState current, HealthEvent event, SensorKind kind) {
  using S = SensorState;
  using E = HealthEvent;
  if (event == E::kStop) return S::kOff;
  switch (current) {
    case S::kOff:
      if (event == E::kStartOk) return S::kIdle;
      if (event == E::kStartFail) return S::kErr;
      break;
    case S::kIdle:
      if (event == E::kRecordOn) return S::kRec;
      if (event == E::kCalStart && kind == SensorKind::kImu) return S::kCal;
      if (event == E::kFault) return S::kErr;
      break;
    case S::kRec:
      if (event == E::kRecordOff) return S::kIdle;
      if (event == E::kFault) return S::kErr;
      break;
    case S::kCal:
      if (event == E::kCalDone) return S::kIdle;
      if (event == E::kFault) return S::kErr;
      break;
    case S::kErr:
      if (event == E::kFaultCleared) return S::kIdle;
      break;
  }
  return std::nullopt;
}

}  // namespace fieldpack::health
