// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// server.hpp -- HTTP and WebSocket control surface for the operator console.
//
//   GET  /status          latest status snapshot (JSON)
//   GET  /stats           ingest counters and pairing statistics (JSON)
//   GET  /odometry        dead-reckoning state (JSON)
//   GET  /preview/<name>  PNG thumbnail of a camera, or LIDAR occupancy
//   POST /command         {"kind": "RECORD_ON", "exposure_us": ..., "sensor": ...}
//   POST /correction      {"p": [x, y, z], "q": [w, x, y, z], "t_ns": ...}
//   GET  /stream          WebSocket: snapshot text messages every 250 ms and
//                         binary preview messages at the configured rate
//
// A binary preview message is a u32 little-endian header length, a JSON
// header {"type":"preview","source":...,"width":...,"height":...,"mean":...}
// and the PNG bytes.

#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "fieldpack/config/config.hpp"
#include "fieldpack/daemon/daemon.hpp"

namespace fieldpack::api {

constexpr std::int64_t kSnapshotPeriodMs = 250;

// Text renderings shared by the HTTP handlers and the stream.
std::string status_json(const daemon::Daemon& d);
std::string stats_json(const daemon::Daemon& d);
std::string odometry_json(const daemon::Daemon& d);

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Routes one request; exposed for tests that bypass the socket.
HttpReply handle_request(daemon::Daemon& d, const config::ApiSettings& settings, std::string_view method,
                         std::string_view target, std::string_view body);

class ApiServer {
 public:
  // Port 0 binds an ephemeral port; see port().
  ApiServer(daemon::Daemon& daemon, config::ApiSettings settings);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  void start();  // throws std::system_error if the port cannot be bound
  void stop();
  std::uint16_t port() const { return port_; }

  std::uint64_t requests() const { return requests_.load(); }
  std::uint64_t snapshots_sent() const { return snapshots_.load(); }
  std::uint64_t previews_sent() const { return previews_.load(); }
  std::uint64_t stream_clients() const { return clients_.load(); }

 private:
  void accept_loop(std::stop_token stop);
  void serve(int fd);
  void stream(int fd, void* websocket);
  void track(int fd, bool add);
  void reap();

  daemon::Daemon& daemon_;
  config::ApiSettings settings_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex conn_mu_;
  std::set<int> open_fds_;
  struct Conn {
    std::jthread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::list<Conn> conns_;
  std::jthread acceptor_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> snapshots_{0};
  std::atomic<std::uint64_t> previews_{0};
  std::atomic<std::uint64_t> clients_{0};
};

}  // namespace fieldpack::api
