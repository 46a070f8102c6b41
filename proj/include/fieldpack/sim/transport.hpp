// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// transport.hpp -- loopback socket paths for simulated sensors: lidar packets
// as UDP datagrams, NMEA as a newline-delimited byte stream.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "fieldpack/common/bytes.hpp"
#include "fieldpack/sim/nmea.hpp"

namespace fieldpack::sim {

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  ~UniqueFd() { reset(); }
  UniqueFd(UniqueFd&& o) noexcept : fd_(o.release()) {}
  UniqueFd& operator=(UniqueFd&& o) noexcept {
    if (this != &o) reset(o.release());
    return *this;
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  int release() {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset(int fd = -1);

 private:
  int fd_ = -1;
};

class UdpSender {
 public:
  UdpSender(std::string host, std::uint16_t port);  // throws std::system_error
  bool send(ByteView datagram);

 private:
  UniqueFd fd_;
  std::string host_;
  std::uint16_t port_;
};

// Binds 127.0.0.1:port (0 picks a free port) and delivers every datagram to
// the handler on its own thread.
class UdpReceiver {
 public:
  using Handler = std::function<void(ByteView)>;
  UdpReceiver(std::uint16_t port, Handler handler);  // throws std::system_error
  ~UdpReceiver();

  std::uint16_t port() const { return port_; }
  std::uint64_t received() const { return received_.load(); }
  void stop();

 private:
  void loop(std::stop_token stop);

  UniqueFd fd_;
  std::uint16_t port_ = 0;
  Handler handler_;
  std::atomic<std::uint64_t> received_{0};
  std::jthread thread_;
};

// Reads NMEA from a byte-stream fd, forwarding GGA sentences and counting the
// others as skipped.
class NmeaStreamReader {
 public:
  using Handler = std::function<void(std::string_view sentence)>;
  NmeaStreamReader(UniqueFd fd, Handler on_gga);
  ~NmeaStreamReader();

  std::uint64_t forwarded() const { return forwarded_.load(); }
  std::uint64_t skipped() const { return skipped_.load(); }
  void stop();

 private:
  void loop(std::stop_token stop);

  UniqueFd fd_;
  Handler on_gga_;
  LineSplitter splitter_;
  std::atomic<std::uint64_t> forwarded_{0};
  std::atomic<std::uint64_t> skipped_{0};
  std::jthread thread_;
};

// Connected pair of stream sockets (AF_UNIX).
std::pair<UniqueFd, UniqueFd> make_stream_pair();

// Writes the whole buffer, retrying on partial writes.
bool write_all(int fd, std::string_view data);

}  // namespace fieldpack::sim
