// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// protocol.hpp -- line protocol for the status screen and push buttons.
//
//   $<TYPE>,<f1>,<f2>...*<XX>\n
//
// XX is the uppercase hex XOR of every byte between '$' and '*'.
//   STAT  NAME=STATE per sensor, descriptor order
//   DISK  free space in MiB
//   FPS   measured camera rate in hundredths of a frame per second
//   BTN   <1|2>,PRESS   (panel to daemon)

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fieldpack/health/monitor.hpp"

namespace fieldpack::panel {

enum class PanelType : std::uint8_t { kStat, kDisk, kFps, kBtn };

std::string_view to_string(PanelType t);
std::optional<PanelType> parse_panel_type(std::string_view s);

struct PanelMessage {
  PanelType type = PanelType::kStat;
  std::vector<std::string> fields;
  bool operator==(const PanelMessage&) const = default;
};

class PanelError : public std::runtime_error {
 public:
  enum class Kind { kIllegalField, kFraming, kChecksum, kUnknownType, kPayload };
  PanelError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Throws PanelError(kIllegalField) for an empty field list, or a field that
// is empty or holds '$', '*', ',' or a control character; PanelError(kPayload)
// when the fields do not fit the message type.
std::string encode_panel(const PanelMessage& message);

// Throws PanelError. The line must end in exactly one '\n'.
PanelMessage decode_panel(std::string_view line);

PanelMessage stat_message(const health::StatusSnapshot& snapshot);
PanelMessage disk_message(std::uint64_t free_bytes);
PanelMessage fps_message(double fps);
PanelMessage button_message(int button);

// STAT, DISK, FPS, in that order.
std::vector<std::string> snapshot_lines(const health::StatusSnapshot& snapshot);

enum class ButtonCommand { kStartSensors, kToggleRecording };

// Maps a BTN message to its command; nullopt for other types.
// Throws PanelError(kPayload) for a malformed BTN payload.
std::optional<ButtonCommand> button_command(const PanelMessage& message);

}  // namespace fieldpack::panel
