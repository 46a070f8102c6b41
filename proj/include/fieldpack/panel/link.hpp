// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// link.hpp -- the panel protocol over a byte stream (serial device,
// pseudo-terminal or socket).

#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fieldpack/panel/protocol.hpp"
#include "fieldpack/sim/nmea.hpp"
#include "fieldpack/sim/transport.hpp"

namespace fieldpack::panel {

// Opens a serial device in raw 8N1 mode at 115200 baud.
sim::UniqueFd open_serial(const std::string& path);

class PanelLink {
 public:
  using ButtonHandler = std::function<void(ButtonCommand)>;

  PanelLink(sim::UniqueFd fd, ButtonHandler on_button);
  ~PanelLink();

  PanelLink(const PanelLink&) = delete;
  PanelLink& operator=(const PanelLink&) = delete;

  // Writes STAT, DISK, FPS as one burst. Returns false if the stream failed.
  bool publish(const health::StatusSnapshot& snapshot);
  bool send_line(const std::string& line);

  void stop();

  std::uint64_t lines_sent() const { return sent_.load(); }
  std::uint64_t buttons_received() const { return buttons_.load(); }
  std::uint64_t rejected_lines() const { return rejected_.load(); }
  std::string last_error() const;

 private:
  void loop(std::stop_token stop);

  sim::UniqueFd fd_;
  ButtonHandler on_button_;
  std::mutex write_mu_;
  mutable std::mutex err_mu_;
  std::string last_error_;
  sim::LineSplitter splitter_{256};
  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> buttons_{0};
  std::atomic<std::uint64_t> rejected_{0};
  std::jthread thread_;
};

}  // namespace fieldpack::panel
