// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// server.cpp -- thread-per-connection HTTP/WebSocket server on Boost.Beast.
// The listening socket is polled so stop() never waits on a blocked accept;
// open connections are shut down to unblock their reads and writes.

#include "fieldpack/api/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <system_error>

#include "fieldpack/api/preview.hpp"
#include "json.hpp"

namespace fieldpack::api {

namespace beast = boost::beast;
namespace http = beast::http;
namespace ws = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

namespace {

constexpr std::uint32_t kLidarPreviewPx = 160;
constexpr double kLidarPreviewRangeM = 50.0;
constexpr double kMaxPreviewHz = 5.0;

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json status_object(const daemon::Daemon& d) {
  const auto snap = d.snapshot();
  json sensors = json::array();
  for (const auto& s : snap.sensors) {
    json faults = json::array();
    for (const auto& f : snap.faults)
      if (f.sensor_id == s.id) faults.push_back(std::string(health::to_string(f.kind)));
    sensors.push_back({{"id", s.id},
                       {"name", s.name},
                       {"kind", std::string(to_string(s.kind))},
                       {"state", std::string(health::to_string(s.state))},
                       {"faults", faults}});
  }
  json faults = json::array();
  for (const auto& f : snap.faults) {
    faults.push_back({{"kind", std::string(health::to_string(f.kind))},
                      {"sensor_id", f.sensor_id},
                      {"raised_at_ns", f.raised_at_ns},
                      {"details", f.details}});
  }
  const auto trig = d.trigger_config();
  json out = {{"type", "snapshot"},
              {"rig", d.config().name},
              {"sensors", sensors},
              {"faults", faults},
              {"disk_free_bytes", snap.disk_free_bytes},
              {"camera_fps", snap.camera_fps_measured},
              {"recording", snap.recording},
              {"uptime_s", snap.uptime_s},
              {"mono_ns", snap.mono_ns},
              {"trigger", {{"fps", trig.fps}, {"exposure_us", trig.exposure_us}}}};
  const auto dir = d.session_directory();
  out["session"] = dir ? json(dir->string()) : json(nullptr);
  return out;
}

std::optional<GrayImage> preview_image(const daemon::Daemon& d, std::string_view name, std::uint32_t max_width) {
  const auto* desc = d.config().find(name);
  if (desc == nullptr) return std::nullopt;
  if (desc->kind == SensorKind::kCamera) {
    const auto side = d.config().camera_sides.find(desc->id);
    if (side == d.config().camera_sides.end()) return std::nullopt;
    const auto frame = d.latest_frame(side->second);
    if (!frame) return std::nullopt;
    return camera_thumbnail(*frame, max_width);
  }
  if (desc->kind == SensorKind::kLidar) {
    return lidar_occupancy(d.latest_lidar_packets(), kLidarPreviewPx, kLidarPreviewRangeM);
  }
  return std::nullopt;
}

HttpReply error_reply(int status, std::string message) {
  return {status, "application/json", json{{"error", std::move(message)}}.dump()};
}

HttpReply handle_command(daemon::Daemon& d, std::string_view body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("malformed JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("kind") || !req["kind"].is_string())
    return error_reply(400, "missing string field 'kind'");
  const auto kind = daemon::parse_command_kind(req["kind"].get<std::string>());
  if (!kind) return error_reply(400, "unknown command kind '" + req["kind"].get<std::string>() + "'");
  daemon::Command cmd{*kind, std::nullopt, std::nullopt};
  if (req.contains("exposure_us")) {
    const auto& e = req["exposure_us"];
    if (!e.is_number_integer() || e.get<std::int64_t>() < 0 || e.get<std::int64_t>() > UINT32_MAX)
      return error_reply(400, "'exposure_us' must be a non-negative integer");
    cmd.exposure_us = e.get<std::uint32_t>();
  }
  if (*kind == daemon::CommandKind::kSetExposure && !cmd.exposure_us)
    return error_reply(400, "SET_EXPOSURE requires 'exposure_us'");
  if (req.contains("sensor")) {
    if (!req["sensor"].is_string()) return error_reply(400, "'sensor' must be a string");
    cmd.sensor = req["sensor"].get<std::string>();
  }
  const auto outcome = d.execute(cmd);
  json out = {{"accepted", outcome.accepted}, {"reason", outcome.reason}, {"transitions", outcome.transitions}};
  if (outcome.effective_from_seq) out["effective_from_seq"] = *outcome.effective_from_seq;
  return {200, "application/json", out.dump()};
}

HttpReply handle_correction(daemon::Daemon& d, std::string_view body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("malformed JSON: ") + e.what());
  }
  auto numbers = [&](const char* key, std::size_t n) -> std::optional<std::vector<double>> {
    if (!req.is_object() || !req.contains(key) || !req[key].is_array() || req[key].size() != n) return std::nullopt;
    std::vector<double> v;
    for (const auto& x : req[key]) {
      if (!x.is_number()) return std::nullopt;
      v.push_back(x.get<double>());
    }
    return v;
  };
  const auto p = numbers("p", 3);
  const auto q = numbers("q", 4);
  if (!p || !q) return error_reply(400, "expected 'p' [x,y,z] and 'q' [w,x,y,z]");
  odom::PoseCorrection c;
  c.p_ref = Eigen::Vector3d((*p)[0], (*p)[1], (*p)[2]);
  c.q_ref = Eigen::Quaterniond((*q)[0], (*q)[1], (*q)[2], (*q)[3]);
  if (req.contains("t_ns")) {
    if (!req["t_ns"].is_number_integer()) return error_reply(400, "'t_ns' must be an integer");
    c.t = req["t_ns"].get<std::int64_t>();
  } else {
    c.t = d.odometry().t;
  }
  try {
    d.correct_pose(c);
  } catch (const std::invalid_argument& e) {
    return error_reply(400, e.what());
  }
  return {200, "application/json", odometry_json(d)};
}

}  // namespace

std::string status_json(const daemon::Daemon& d) { return status_object(d).dump(); }

std::string stats_json(const daemon::Daemon& d) {
  json sensors = json::array();
  for (const auto& s : d.stats()) {
    sensors.push_back({{"id", s.id},
                       {"name", s.name},
                       {"ingested", s.ingested_count},
                       {"recorded", s.recorded_count},
                       {"dropped", s.dropped_count},
                       {"dropped_queue_overflow", s.dropped_queue_overflow},
                       {"dropped_disk_full", s.dropped_disk_full},
                       {"dropped_not_recording", s.dropped_not_recording},
                       {"bytes_in", s.bytes_in},
                       {"rate_hz", s.measured_rate_hz},
                       {"bandwidth_bps", s.measured_bandwidth_bps}});
  }
  const auto p = d.pairing();
  return json{{"sensors", sensors},
              {"pairing",
               {{"pairs", p.pairs},
                {"dropouts_left", p.dropouts_left},
                {"dropouts_right", p.dropouts_right},
                {"duplicates", p.duplicates},
                {"late", p.late}}},
              {"session_open", d.session_open()},
              {"events_dropped", d.events_dropped()}}
      .dump();
}

std::string odometry_json(const daemon::Daemon& d) {
  const auto s = d.odometry();
  return json{{"t_ns", s.t},
              {"q", {s.q.w(), s.q.x(), s.q.y(), s.q.z()}},
              {"v", vec3(s.v)},
              {"p", vec3(s.p)}}
      .dump();
}

HttpReply handle_request(daemon::Daemon& d, const config::ApiSettings& settings, std::string_view method,
                         std::string_view target, std::string_view body) {
  const auto q = target.find('?');
  const std::string_view path = target.substr(0, q);
  const bool get = method == "GET";
  const bool post = method == "POST";
  if (path == "/status") return get ? HttpReply{200, "application/json", status_json(d)} : error_reply(405, "GET only");
  if (path == "/stats") return get ? HttpReply{200, "application/json", stats_json(d)} : error_reply(405, "GET only");
  if (path == "/odometry")
    return get ? HttpReply{200, "application/json", odometry_json(d)} : error_reply(405, "GET only");
  if (path == "/command") return post ? handle_command(d, body) : error_reply(405, "POST only");
  if (path == "/correction") return post ? handle_correction(d, body) : error_reply(405, "POST only");
  constexpr std::string_view kPreview = "/preview/";
  if (path.starts_with(kPreview)) {
    if (!get) return error_reply(405, "GET only");
    const auto img = preview_image(d, path.substr(kPreview.size()), settings.preview_max_width);
    if (!img) return error_reply(404, "no preview for '" + std::string(path.substr(kPreview.size())) + "'");
    const auto png = encode_png(*img);
    return {200, "image/png", std::string(png.begin(), png.end())};
  }
  return error_reply(404, "no route for " + std::string(path));
}

ApiServer::ApiServer(daemon::Daemon& daemon, config::ApiSettings settings)
    : daemon_(daemon), settings_(std::move(settings)) {}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start() {
  if (listen_fd_ >= 0) return;
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(settings_.port);
  if (::inet_pton(AF_INET, settings_.bind.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw std::system_error(EINVAL, std::generic_category(), "bad bind address '" + settings_.bind + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
    const int err = errno;
    ::close(fd);
    throw std::system_error(err, std::generic_category(),
                            "bind " + settings_.bind + ":" + std::to_string(settings_.port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  listen_fd_ = fd;
  stopping_ = false;
  acceptor_ = std::jthread([this](std::stop_token st) { accept_loop(st); });
}

void ApiServer::stop() {
  if (listen_fd_ < 0) return;
  stopping_ = true;
  acceptor_.request_stop();
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  {
    std::lock_guard lock(conn_mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  conns_.clear();  // joins
}

void ApiServer::track(int fd, bool add) {
  std::lock_guard lock(conn_mu_);
  if (add) {
    open_fds_.insert(fd);
    if (stopping_) ::shutdown(fd, SHUT_RDWR);
  } else {
    open_fds_.erase(fd);
  }
}

void ApiServer::reap() {
  for (auto it = conns_.begin(); it != conns_.end();) {
    if (it->done->load()) {
      it = conns_.erase(it);
    } else {
      ++it;
    }
  }
}

void ApiServer::accept_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int n = ::poll(&pfd, 1, 100);
    reap();
    if (n <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    auto done = std::make_shared<std::atomic<bool>>(false);
    track(fd, true);
    conns_.push_back(Conn{std::jthread([this, fd, done] {
                            serve(fd);
                            done->store(true);
                          }),
                          done});
  }
}

void ApiServer::serve(int fd) {
  asio::io_context ioc;
  tcp::socket sock(ioc);
  boost::system::error_code ec;
  sock.assign(tcp::v4(), fd, ec);
  if (ec) {
    track(fd, false);
    ::close(fd);
    return;
  }
  beast::flat_buffer buffer;
  while (!stopping_) {
    http::request<http::string_body> req;
    http::read(sock, buffer, req, ec);
    if (ec) break;
    ++requests_;
    if (ws::is_upgrade(req)) {
      if (req.target() != "/stream") {
        http::response<http::string_body> res{http::status::not_found, req.version()};
        res.body() = "no stream at this path";
        res.prepare_payload();
        http::write(sock, res, ec);
        break;
      }
      ws::stream<tcp::socket> socket_ws(std::move(sock));
      socket_ws.accept(req, ec);
      if (!ec) stream(fd, &socket_ws);
      track(fd, false);
      return;  // socket_ws closes the fd
    }
    const auto method = req.method_string();
    const auto target = req.target();
    const auto reply = handle_request(daemon_, settings_, std::string_view(method.data(), method.size()),
                                      std::string_view(target.data(), target.size()), req.body());
    http::response<http::string_body> res{static_cast<http::status>(reply.status), req.version()};
    res.set(http::field::server, "fieldpack");
    res.set(http::field::content_type, reply.content_type);
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = reply.body;
    res.prepare_payload();
    http::write(sock, res, ec);
    if (ec || !req.keep_alive()) break;
  }
  track(fd, false);
  sock.shutdown(tcp::socket::shutdown_both, ec);
}

void ApiServer::stream(int /*fd*/, void* websocket) {
  auto& wsock = *static_cast<ws::stream<tcp::socket>*>(websocket);
  using clk = std::chrono::steady_clock;
  const double hz = std::min(settings_.preview_hz, kMaxPreviewHz);
  const auto preview_period =
      hz > 0.0 ? std::chrono::duration_cast<clk::duration>(std::chrono::duration<double>(1.0 / hz)) : clk::duration::max();
  const auto snapshot_period = std::chrono::milliseconds(kSnapshotPeriodMs);
  ++clients_;
  auto next_snapshot = clk::now();
  auto next_preview = clk::now() + preview_period / 2;
  boost::system::error_code ec;
  while (!stopping_ && !ec) {
    const auto now = clk::now();
    if (now >= next_snapshot) {
      wsock.text(true);
      wsock.write(asio::buffer(status_json(daemon_)), ec);
      if (ec) break;
      ++snapshots_;
      next_snapshot += snapshot_period;
      if (next_snapshot < now) next_snapshot = now + snapshot_period;
    }
    if (hz > 0.0 && now >= next_preview) {
      // Only the newest data is rendered, so a slow client skips frames.
      for (const auto& s : daemon_.config().sensors) {
        if (s.kind != SensorKind::kCamera && s.kind != SensorKind::kLidar) continue;
        const auto img = preview_image(daemon_, s.name, settings_.preview_max_width);
        if (!img) continue;
        const auto png = encode_png(*img);
        const std::string header = json{{"type", "preview"},
                                        {"source", s.name},
                                        {"width", img->width},
                                        {"height", img->height},
                                        {"mean", img->mean()}}
                                       .dump();
        std::string msg(4, '\0');
        const auto n = static_cast<std::uint32_t>(header.size());
        for (int i = 0; i < 4; ++i) msg[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
        msg += header;
        msg.append(png.begin(), png.end());
        wsock.binary(true);
        wsock.write(asio::buffer(msg), ec);
        if (ec) break;
        ++previews_;
      }
      next_preview += preview_period;
      if (next_preview < now) next_preview = now + preview_period;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  --clients_;
  if (!ec) wsock.close(ws::close_code::going_away, ec);
}

}  // namespace fieldpack::api
