// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/panel/protocol.hpp"

#include <cmath>

#include "fieldpack/sim/nmea.hpp"

namespace fieldpack::panel {

namespace {

bool legal_field(std::string_view f) {
  if (f.empty()) return false;
  for (unsigned char c : f) {
    if (c == '$' || c == '*' || c == ',' || c < 0x20 || c >= 0x7F) return false;
  }
  return true;
}

bool is_upper_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'); }

bool is_decimal(std::string_view s) {
  if (s.empty() || s.size() > 19) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return s.size() == 1 || s[0] != '0';
}

void check_payload(const PanelMessage& m) {
  auto fail = [&](const std::string& why) {
    throw PanelError(PanelError::Kind::kPayload, std::string(to_string(m.type)) + ": " + why);
  };
  switch (m.type) {
    case PanelType::kStat:
      for (const auto& f : m.fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0 || !health::parse_state(f.substr(eq + 1))) {
          fail("expected NAME=STATE, got '" + f + "'");
        }
      }
      break;
    case PanelType::kDisk:
    case PanelType::kFps:
      if (m.fields.size() != 1 || !is_decimal(m.fields[0])) fail("expected one decimal integer");
      break;
    case PanelType::kBtn:
      if (m.fields.size() != 2 || (m.fields[0] != "1" && m.fields[0] != "2") || m.fields[1] != "PRESS") {
        fail("expected <1|2>,PRESS");
      }
      break;
  }
}

}  // namespace

std::string_view to_string(PanelType t) {
  switch (t) {
    case PanelType::kStat: return "STAT";
    case PanelType::kDisk: return "DISK";
    case PanelType::kFps: return "FPS";
    case PanelType::kBtn: return "BTN";
  }
  return "?";
}

std::optional<PanelType> parse_panel_type(std::string_view s) {
  for (auto t : {PanelType::kStat, PanelType::kDisk, PanelType::kFps, PanelType::kBtn}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string encode_panel(const PanelMessage& message) {
  if (message.fields.empty()) {
    throw PanelError(PanelError::Kind::kIllegalField, "panel message needs at least one field");
  }
  std::string body(to_string(message.type));
  for (const auto& f : message.fields) {
    if (!legal_field(f)) {
      throw PanelError(PanelError::Kind::kIllegalField, "illegal panel field '" + f + "'");
    }
    body += ',';
    body += f;
  }
  check_payload(message);
  return "$" + body + "*" + sim::nmea_checksum(body) + "\n";
}

PanelMessage decode_panel(std::string_view line) {
  auto framing = [](const std::string& why) {
    return PanelError(PanelError::Kind::kFraming, "panel framing: " + why);
  };
  if (line.size() < 5 || line.front() != '$' || line.back() != '\n') {
    throw framing("expected $...*XX\\n");
  }
  const std::size_t star = line.size() - 4;
  if (line[star] != '*') throw framing("checksum separator missing");
  const std::string_view body = line.substr(1, star - 1);
  if (body.find_first_of("$*\n") != std::string_view::npos) throw framing("stray delimiter");
  const std::string_view given = line.substr(star + 1, 2);
  if (!is_upper_hex(given[0]) || !is_upper_hex(given[1])) throw framing("checksum is not uppercase hex");
  if (sim::nmea_checksum(body) != given) {
    throw PanelError(PanelError::Kind::kChecksum, "panel checksum mismatch");
  }
  const std::size_t comma = body.find(',');
  if (comma == std::string_view::npos) throw framing("message has no payload");
  const auto type = parse_panel_type(body.substr(0, comma));
  if (!type) {
    throw PanelError(PanelError::Kind::kUnknownType,
                     "unknown panel message type '" + std::string(body.substr(0, comma)) + "'");
  }
  PanelMessage m;
  m.type = *type;
  std::string_view rest = body.substr(comma + 1);
  while (true) {
    const std::size_t c = rest.find(',');
    const std::string_view f = rest.substr(0, c);
    if (!legal_field(f)) throw PanelError(PanelError::Kind::kPayload, "illegal field in panel payload");
    m.fields.emplace_back(f);
    if (c == std::string_view::npos) break;
    rest.remove_prefix(c + 1);
  }
  check_payload(m);
  return m;
}

PanelMessage stat_message(const health::StatusSnapshot& snapshot) {
  PanelMessage m{PanelType::kStat, {}};
  for (const auto& s : snapshot.sensors) {
    m.fields.push_back(s.name + "=" + std::string(health::to_string(s.state)));
  }
  return m;
}

PanelMessage disk_message(std::uint64_t free_bytes) {
  return {PanelType::kDisk, {std::to_string(free_bytes >> 20)}};
}

PanelMessage fps_message(double fps) {
  const long long centi = std::isfinite(fps) && fps > 0.0 ? std::llround(fps * 100.0) : 0;
  return {PanelType::kFps, {std::to_string(centi)}};
}

PanelMessage button_message(int button) {
  return {PanelType::kBtn, {std::to_string(button), "PRESS"}};
}

std::vector<std::string> snapshot_lines(const health::StatusSnapshot& snapshot) {
  std::vector<std::string> out;
  if (!snapshot.sensors.empty()) out.push_back(encode_panel(stat_message(snapshot)));
  out.push_back(encode_panel(disk_message(snapshot.disk_free_bytes)));
  out.push_back(encode_panel(fps_message(snapshot.camera_fps_measured)));
  return out;
}

std::optional<ButtonCommand> button_command(const PanelMessage& message) {
  if (message.type != PanelType::kBtn) return std::nullopt;
  check_payload(message);
  return message.fields[0] == "1" ? ButtonCommand::kStartSensors : ButtonCommand::kToggleRecording;
}

}  // namespace fieldpack::panel
