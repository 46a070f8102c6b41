// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/panel/link.hpp"

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace fieldpack::panel {

sim::UniqueFd open_serial(const std::string& path) {
  const int fd = ::open(path.c_str(), O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (fd < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  sim::UniqueFd out(fd);
  termios tio{};
  if (::tcgetattr(fd, &tio) == 0) {
    ::cfmakeraw(&tio);
    ::cfsetispeed(&tio, B115200);
    ::cfsetospeed(&tio, B115200);
    tio.c_cflag |= CLOCAL | CREAD;
    ::tcsetattr(fd, TCSANOW, &tio);
  }
  return out;
}

PanelLink::PanelLink(sim::UniqueFd fd, ButtonHandler on_button)
    : fd_(std::move(fd)), on_button_(std::move(on_button)) {
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

PanelLink::~PanelLink() { stop(); }

void PanelLink::stop() {
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

bool PanelLink::send_line(const std::string& line) {
  std::lock_guard lock(write_mu_);
  if (!sim::write_all(fd_.get(), line)) return false;
  sent_.fetch_add(1);
  return true;
}

bool PanelLink::publish(const health::StatusSnapshot& snapshot) {
  const auto lines = snapshot_lines(snapshot);
  std::string burst;
  for (const auto& l : lines) burst += l;
  std::lock_guard lock(write_mu_);
  if (!sim::write_all(fd_.get(), burst)) return false;
  sent_.fetch_add(lines.size());
  return true;
}

std::string PanelLink::last_error() const {
  std::lock_guard lock(err_mu_);
  return last_error_;
}

void PanelLink::loop(std::stop_token stop) {
  char buf[512];
  while (!stop.stop_requested()) {
    pollfd p{fd_.get(), POLLIN, 0};
    const int r = ::poll(&p, 1, 50);
    if (r <= 0) continue;
    const ssize_t n = ::read(fd_.get(), buf, sizeof buf);
    if (n <= 0) {
      if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
      return;
    }
    splitter_.feed(std::string_view(buf, static_cast<std::size_t>(n)), [&](std::string_view line) {
      try {
        const PanelMessage m = decode_panel(std::string(line) + "\n");
        if (auto cmd = button_command(m)) {
          buttons_.fetch_add(1);
          if (on_button_) on_button_(*cmd);
        } else {
          rejected_.fetch_add(1);
        }
      } catch (const PanelError& e) {
        rejected_.fetch_add(1);
        std::lock_guard lock(err_mu_);
        last_error_ = e.what();
      }
    });
  }
}

}  // namespace fieldpack::panel
