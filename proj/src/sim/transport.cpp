// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/sim/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <system_error>

namespace fieldpack::sim {

namespace {

[[noreturn]] void throw_errno(const char* what) {
  throw std::system_error(errno, std::generic_category(), what);
}

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  return addr;
}

// Waits up to 50 ms for input so the owning thread can notice stop requests.
bool wait_readable(int fd) {
  pollfd p{fd, POLLIN, 0};
  return ::poll(&p, 1, 50) > 0;
}

}  // namespace

void UniqueFd::reset(int fd) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = fd;
}

UdpSender::UdpSender(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {
  fd_.reset(::socket(AF_INET, SOCK_DGRAM, 0));
  if (!fd_) throw_errno("udp socket");
}

bool UdpSender::send(ByteView datagram) {
  sockaddr_in addr = loopback(port_);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) return false;
  const ssize_t n = ::sendto(fd_.get(), datagram.data(), datagram.size(), 0,
                             reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
  return n == static_cast<ssize_t>(datagram.size());
}

UdpReceiver::UdpReceiver(std::uint16_t port, Handler handler) : handler_(std::move(handler)) {
  fd_.reset(::socket(AF_INET, SOCK_DGRAM, 0));
  if (!fd_) throw_errno("udp socket");
  int rcvbuf = 4 << 20;
  ::setsockopt(fd_.get(), SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof rcvbuf);
  sockaddr_in addr = loopback(port);
  if (::bind(fd_.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw_errno("udp bind");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

UdpReceiver::~UdpReceiver() { stop(); }

void UdpReceiver::stop() {
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

void UdpReceiver::loop(std::stop_token stop) {
  std::uint8_t buf[65536];
  while (!stop.stop_requested()) {
    if (!wait_readable(fd_.get())) continue;
    const ssize_t n = ::recv(fd_.get(), buf, sizeof buf, 0);
    if (n < 0) continue;
    received_.fetch_add(1);
    handler_(ByteView(buf, static_cast<std::size_t>(n)));
  }
}

NmeaStreamReader::NmeaStreamReader(UniqueFd fd, Handler on_gga)
    : fd_(std::move(fd)), on_gga_(std::move(on_gga)) {
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

NmeaStreamReader::~NmeaStreamReader() { stop(); }

void NmeaStreamReader::stop() {
  thread_.request_stop();
  if (thread_.joinable()) thread_.join();
}

void NmeaStreamReader::loop(std::stop_token stop) {
  char buf[4096];
  while (!stop.stop_requested()) {
    if (!wait_readable(fd_.get())) continue;
    const ssize_t n = ::read(fd_.get(), buf, sizeof buf);
    if (n <= 0) return;  // peer closed
    splitter_.feed(std::string_view(buf, static_cast<std::size_t>(n)), [&](std::string_view line) {
      const auto type = nmea_sentence_type(line);
      if (type && *type == "GGA") {
        forwarded_.fetch_add(1);
        on_gga_(line);
      } else {
        skipped_.fetch_add(1);
      }
    });
  }
}

std::pair<UniqueFd, UniqueFd> make_stream_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) throw_errno("socketpair");
  return {UniqueFd(fds[0]), UniqueFd(fds[1])};
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace fieldpack::sim
