// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/daemon/daemon.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "fieldpack/sim/lidar_packet.hpp"
#include "fieldpack/sim/nmea.hpp"

namespace fieldpack::daemon {

namespace fs = std::filesystem;
using health::FaultKind;

namespace {

constexpr std::array<std::pair<CommandKind, std::string_view>, 6> kCommandNames{{
    {CommandKind::kStartSensors, "START_SENSORS"},
    {CommandKind::kStopSensors, "STOP_SENSORS"},
    {CommandKind::kRecordOn, "RECORD_ON"},
    {CommandKind::kRecordOff, "RECORD_OFF"},
    {CommandKind::kSetExposure, "SET_EXPOSURE"},
    {CommandKind::kStartCal, "START_CAL"},
}};

constexpr std::int64_t kTickNs = 100 * kNsPerMs;
constexpr std::int64_t kDiskSampleNs = kNsPerSec;

int side_index(sim::CameraId side) { return side == sim::CameraId::kLeft ? 0 : 1; }

}  // namespace

std::string_view to_string(CommandKind k) {
  for (const auto& [kind, name] : kCommandNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<CommandKind> parse_command_kind(std::string_view s) {
  for (const auto& [kind, name] : kCommandNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

struct Daemon::Source {
  SensorDescriptor desc;
  std::unique_ptr<sim::SourceRunner> runner;
  std::unique_ptr<sim::CameraSource> camera;
  sim::LidarGenerator* lidar = nullptr;
  sim::GnssGenerator* gnss = nullptr;

  void pause() {
    if (runner) runner->pause();
    if (camera) camera->pause();
  }
  void resume() {
    if (runner) runner->resume();
    if (camera) camera->resume();
  }
  void stop() {
    if (runner) runner->stop();
    if (camera) camera->stop();
  }
};

Daemon::Daemon(config::RigConfig config, DaemonOptions options)
    : config_(std::move(config)),
      clock_(SystemClock::instance()),
      panel_fd_(std::move(options.panel_fd)),
      queue_(config_.recorder.queue_capacity) {
  config::validate_for_run(config_);
  ingestor_ = std::make_unique<acq::Ingestor>(config_.sensors, clock_);
  health_ = std::make_unique<health::HealthMonitor>(config_.sensors, config_.thresholds, clock_);
  const std::int64_t window = 5 * trigger::TriggerConfig(config_.trigger).period_ns();
  pairer_ = std::make_unique<acq::FramePairer<PairedFrame>>(window);
  lidar_ring_size_ = static_cast<std::size_t>(
      std::max(1.0, std::ceil(sim::lidar_packet_rate(config_.sim.lidar) / config_.sim.lidar.rotation_hz)));

  auto sink = [this](RawDatum&& d) { return on_datum(std::move(d)); };
  const std::int64_t now = clock_.mono_ns();
  const bool has_cameras = config_.camera(sim::CameraId::kLeft).has_value();
  if (has_cameras) trigger_ = std::make_unique<trigger::TriggerService>(config_.trigger, clock_);

  for (const auto& d : config_.sensors) {
    auto src = std::make_unique<Source>();
    src->desc = d;
    switch (d.kind) {
      case SensorKind::kCamera: {
        const sim::CameraId side = config_.camera_sides.at(d.id);
        src->camera = std::make_unique<sim::CameraSource>(d.id, side, config_.sim.camera,
                                                          config_.sim.seed + d.id, sink);
        src->camera->set_temperature(config_.sim.camera_temperature_c);
        sim::CameraSource* cam = src->camera.get();
        trigger_->subscribe([cam](const trigger::TriggerEvent& e) { cam->on_trigger({e.seq, e.exposure_us}); });
        break;
      }
      case SensorKind::kLidar: {
        auto gen = std::make_unique<sim::LidarGenerator>(d.id, config_.sim.lidar, now);
        src->lidar = gen.get();
        src->runner = std::make_unique<sim::SourceRunner>(std::move(gen), sink, clock_);
        break;
      }
      case SensorKind::kImu: {
        sim::ImuSimulator imu(config_.sim.imu_profile, config_.sim.imu_accel_bias, config_.sim.imu_gyro_bias);
        auto gen = std::make_unique<sim::ImuGenerator>(d.id, std::move(imu), d.nominal_rate_hz, now);
        src->runner = std::make_unique<sim::SourceRunner>(std::move(gen), sink, clock_);
        break;
      }
      case SensorKind::kGnss: {
        sim::GnssSimConfig g = config_.sim.gnss;
        g.rate_hz = d.nominal_rate_hz;
        auto gen = std::make_unique<sim::GnssGenerator>(d.id, g, now, clock_.wall_ns() - now);
        src->gnss = gen.get();
        src->runner = std::make_unique<sim::SourceRunner>(std::move(gen), sink, clock_);
        break;
      }
    }
    src->pause();
    sources_.push_back(std::move(src));
  }

  // The initial odometry pose follows the simulated trajectory at t = 0.
  const sim::TruthState t0 = sim::ImuSimulator(config_.sim.imu_profile).truth(0.0);
  odom::OdomState s0;
  s0.q = t0.q;
  s0.v = t0.v;
  s0.p = t0.p;
  s0.t = now;
  odom_.reset(s0);
}

Daemon::~Daemon() { stop(); }

void Daemon::start() {
  std::lock_guard lock(cmd_mu_);
  if (started_ || stopped_) return;
  started_ = true;
  std::error_code ec;
  fs::create_directories(config_.recorder.root, ec);
  if (!panel_fd_ && !config_.daemon.panel_device.empty()) panel_fd_ = panel::open_serial(config_.daemon.panel_device);
  if (panel_fd_) {
    panel_ = std::make_unique<panel::PanelLink>(std::move(panel_fd_), [this](panel::ButtonCommand c) { on_button(c); });
  }
  writer_thread_ = std::jthread([this](std::stop_token st) { writer_loop(st); });
  maintenance_ = std::jthread([this](std::stop_token st) { maintenance_loop(st); });
  if (trigger_) trigger_->start();
  for (auto& s : sources_) {
    if (s->runner) s->runner->start();
    if (s->camera) s->camera->start();
  }
  if (config_.daemon.autostart) {
    execute_locked({CommandKind::kStartSensors, std::nullopt, std::nullopt});
    if (config_.daemon.autorecord) execute_locked({CommandKind::kRecordOn, std::nullopt, std::nullopt});
  }
}

void Daemon::stop() {
  {
    std::lock_guard lock(cmd_mu_);
    if (stopped_) return;
    stopped_ = true;
    if (started_) {
      writer_stalled_.store(false);
      acq::IngestStats at_close;
      bool closing = false;
      {
        std::unique_lock gate(gate_mu_);
        if (session_open_) {
          health_->record_off();
          session_open_ = false;
          at_close = ingestor_->stats();
          closing = true;
        }
      }
      if (closing) finish_session(at_close);
    }
  }
  if (panel_) panel_->stop();
  if (trigger_) trigger_->stop();
  for (auto& s : sources_) s->stop();
  maintenance_.request_stop();
  if (maintenance_.joinable()) maintenance_.join();
  queue_.close();
  writer_thread_.request_stop();
  if (writer_thread_.joinable()) writer_thread_.join();
}

CommandOutcome Daemon::execute(const Command& command) {
  std::lock_guard lock(cmd_mu_);
  if (stopped_) return {false, "daemon is stopping", 0, std::nullopt};
  return execute_locked(command);
}

void Daemon::on_button(panel::ButtonCommand c) {
  std::lock_guard lock(cmd_mu_);
  if (stopped_) return;
  if (c == panel::ButtonCommand::kStartSensors) {
    execute_locked({CommandKind::kStartSensors, std::nullopt, std::nullopt});
  } else {
    const CommandKind k = health_->session_active() ? CommandKind::kRecordOff : CommandKind::kRecordOn;
    execute_locked({k, std::nullopt, std::nullopt});
  }
}

template <typename Fn>
CommandOutcome Daemon::gated(Fn&& fn) {
  CommandOutcome out;
  acq::IngestStats at_close;
  bool closing = false;
  {
    std::unique_lock gate(gate_mu_);
    const health::CommandResult r = fn();
    out.accepted = r.accepted;
    out.reason = r.reason;
    out.transitions = r.transitions;
    if (health_->session_active() && !session_open_) {
      rec::Manifest m;
      m.session = rec::SessionId::random();
      m.start_wall_ns = clock_.wall_ns();
      m.sensors = config_.sensors;
      rec::SessionOptions opts;
      opts.roll_threshold_bytes = config_.recorder.roll_threshold_bytes;
      opts.simulated_capacity_bytes = config_.recorder.simulated_capacity_bytes;
      try {
        auto w = std::make_unique<rec::SessionWriter>(config_.recorder.root, m, opts);
        std::lock_guard wl(writer_mu_);
        writer_ = std::move(w);
      } catch (const std::exception& e) {
        health_->record_off();
        return {false, std::string("cannot open a session: ") + e.what(), 0, std::nullopt};
      }
      ingestor_->reset_stats();
      {
        std::lock_guard pl(pair_mu_);
        pairer_ = std::make_unique<acq::FramePairer<PairedFrame>>(5 * trigger::TriggerConfig(config_.trigger).period_ns());
      }
      events_recorded_.store(0);
      events_dropped_.store(0);
      session_start_mono_ = clock_.mono_ns();
      session_open_ = true;
    } else if (!health_->session_active() && session_open_) {
      session_open_ = false;
      at_close = ingestor_->stats();
      closing = true;
    }
  }
  if (closing) finish_session(at_close);
  return out;
}

CommandOutcome Daemon::execute_locked(const Command& c) {
  switch (c.kind) {
    case CommandKind::kStartSensors: {
      set_sources_running(true);
      return gated([&] { return health_->start_sensors(killed_); });
    }
    case CommandKind::kStopSensors: {
      CommandOutcome out = gated([&] { return health_->stop_sensors(); });
      set_sources_running(false);
      return out;
    }
    case CommandKind::kRecordOn:
      return gated([&] { return health_->record_on(); });
    case CommandKind::kRecordOff:
      return gated([&] { return health_->record_off(); });
    case CommandKind::kSetExposure: {
      if (!c.exposure_us) return {false, "SET_EXPOSURE needs exposure_us", 0, std::nullopt};
      if (!trigger_) return {false, "the rig has no triggered cameras", 0, std::nullopt};
      const auto change = trigger_->set_exposure(*c.exposure_us);
      if (change.violation) return {false, change.violation->message, 0, std::nullopt};
      return {true, "", 0, change.effective_from};
    }
    case CommandKind::kStartCal: {
      std::optional<SensorId> id;
      if (c.sensor) {
        const SensorDescriptor* d = ingestor_->find(*c.sensor);
        if (!d) return {false, "unknown sensor '" + *c.sensor + "'", 0, std::nullopt};
        id = d->id;
      }
      return gated([&] { return health_->start_cal(id); });
    }
  }
  return {false, "unknown command", 0, std::nullopt};
}

void Daemon::set_sources_running(bool running) {
  for (auto& s : sources_) {
    if (running && !killed_.contains(s->desc.id)) {
      s->resume();
    } else if (!running) {
      s->pause();
    }
  }
}

void Daemon::finish_session(const acq::IngestStats& at_close) {
  // The gate is closed, so nothing new enters the queue; wait for the writer.
  while (pending_.load() > 0) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  SessionSummary sum;
  {
    std::lock_guard wl(writer_mu_);
    if (!writer_) return;
    writer_->close();
    sum.id = writer_->manifest().session;
    sum.directory = writer_->directory();
    sum.bytes_written = writer_->bytes_written();
    sum.segments = writer_->segment_seq();
    writer_.reset();
  }
  sum.stats = ingestor_->stats();
  for (std::size_t i = 0; i < sum.stats.size() && i < at_close.size(); ++i) {
    sum.stats[i].ingested_count = at_close[i].ingested_count;
    sum.stats[i].bytes_in = at_close[i].bytes_in;
    sum.stats[i].measured_rate_hz = at_close[i].measured_rate_hz;
    sum.stats[i].measured_bandwidth_bps = at_close[i].measured_bandwidth_bps;
  }
  {
    std::lock_guard pl(pair_mu_);
    sum.pairing = pairer_->stats();
  }
  sum.events_recorded = events_recorded_.load();
  sum.events_dropped = events_dropped_.load();
  sum.duration_s = static_cast<double>(clock_.mono_ns() - session_start_mono_) * 1e-9;
  std::lock_guard wl(writer_mu_);
  last_session_ = std::move(sum);
}

bool Daemon::on_datum(RawDatum&& datum) {
  std::shared_lock gate(gate_mu_);
  std::optional<StampedRecord> r = ingestor_->ingest(std::move(datum));
  if (!r) return true;
  observe(*r);
  if (session_open_) record(std::move(*r));
  return true;
}

void Daemon::observe(const StampedRecord& r) {
  const SensorDescriptor* d = ingestor_->find(r.sensor_id);
  if (!d) return;
  const std::int64_t now = r.mono_ns;
  health_->observe_arrival(r.sensor_id, now);
  switch (d->kind) {
    case SensorKind::kCamera: {
      sim::FrameHeader h;
      try {
        h = sim::peek_frame_header(r.payload);
      } catch (const std::invalid_argument&) {
        return;
      }
      health_->observe_frame(r.sensor_id, h.temperature_c, now);
      acq::PairingOutput<PairedFrame> out;
      {
        std::lock_guard pl(pair_mu_);
        out = pairer_->push(h.camera_id, PairedFrame{h.trigger_seq}, now);
      }
      handle_pairing(std::move(out), now, r.wall_ns);
      std::lock_guard lock(preview_mu_);
      latest_raw_[side_index(h.camera_id)] = r.payload;
      break;
    }
    case SensorKind::kLidar: {
      std::vector<sim::LidarPoint> pts;
      try {
        pts = sim::parse_lidar_packet(r.payload);
      } catch (const std::exception&) {
        return;
      }
      std::uint32_t near = 0;
      for (const auto& p : pts) {
        if (p.zero_return || p.range_m < config_.thresholds.obstruction_range_m) ++near;
      }
      health_->observe_lidar(r.sensor_id, static_cast<std::uint32_t>(pts.size()), near, now);
      std::lock_guard lock(preview_mu_);
      lidar_ring_.push_back(r.payload);
      while (lidar_ring_.size() > lidar_ring_size_) lidar_ring_.pop_front();
      break;
    }
    case SensorKind::kGnss: {
      try {
        const std::string_view s(reinterpret_cast<const char*>(r.payload.data()), r.payload.size());
        health_->observe_gnss(r.sensor_id, sim::parse_nmea_gga(s).fix_quality, now);
      } catch (const std::exception&) {
      }
      break;
    }
    case SensorKind::kImu: {
      sim::ImuSample smp;
      try {
        smp = sim::decode_imu_payload(r.payload);
      } catch (const std::invalid_argument&) {
        return;
      }
      smp.mono_time = now;
      const odom::StepResult res = odom_.feed(smp);
      if (!res.applied) return;
      const auto period = static_cast<std::int64_t>(1e9 / config_.daemon.odom_event_hz);
      if (now - last_odom_event_.load() >= period) {
        last_odom_event_.store(now);
        push_event(odom::encode_odom_event(res.state), now, r.wall_ns);
      }
      break;
    }
  }
}

void Daemon::record(StampedRecord&& r) {
  const SensorId id = r.sensor_id;
  if (!health_->is_recording(id)) {
    ingestor_->note_dropped(id, acq::DropReason::kNotRecording);
    return;
  }
  const std::int64_t now = r.mono_ns;
  pending_.fetch_add(1);
  const auto res = acq::enqueue_for_recording(std::move(r), queue_, *ingestor_, [&](SensorId sid) {
    health_->signal_fault(sid, FaultKind::kQueueOverflow, "recording queue full", now);
  });
  if (res == acq::EnqueueResult::kDropped) pending_.fetch_sub(1);
}

// Caller holds the gate (shared or exclusive).
void Daemon::push_event(Bytes payload, std::int64_t mono_ns, std::int64_t wall_ns) {
  if (!session_open_) return;
  StampedRecord e;
  e.sensor_id = kSystemSensorId;
  e.record_type = RecordType::kEvent;
  e.wall_ns = wall_ns;
  e.payload = std::move(payload);
  // Events come from several source threads; stamp and enqueue under one
  // lock so the EVENT stream is time-ordered on disk.
  std::lock_guard lock(event_mu_);
  e.mono_ns = std::max(mono_ns, last_event_mono_);
  last_event_mono_ = e.mono_ns;
  pending_.fetch_add(1);
  if (queue_.try_push(std::move(e)) != PushResult::kAccepted) {
    pending_.fetch_sub(1);
    events_dropped_.fetch_add(1);
  }
}

void Daemon::handle_pairing(acq::PairingOutput<PairedFrame>&& out, std::int64_t mono, std::int64_t wall) {
  for (std::size_t i = 0; i < out.pairs.size(); ++i) health_->note_pair(mono);
  for (const auto& d : out.dropouts) {
    const std::string text =
        "DROPOUT," + std::string(sim::camera_name(d.missing)) + "," + std::to_string(d.trigger_seq);
    push_event(Bytes(text.begin(), text.end()), mono, wall);
  }
}

void Daemon::writer_loop(std::stop_token stop) {
  while (true) {
    if (writer_stalled_.load()) {
      if (stop.stop_requested()) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      continue;
    }
    std::optional<StampedRecord> r = queue_.pop_wait(std::chrono::milliseconds(50));
    if (!r) {
      if (stop.stop_requested() || queue_.closed()) break;
      continue;
    }
    const bool system = r->sensor_id == kSystemSensorId;
    rec::AppendResult res;
    {
      std::lock_guard wl(writer_mu_);
      if (writer_) {
        res = writer_->append(*r);
      } else {
        res.status = rec::AppendStatus::kIoError;
        res.error = "no open session";
      }
    }
    if (res.ok()) {
      if (system) {
        events_recorded_.fetch_add(1);
      } else {
        ingestor_->note_recorded(r->sensor_id);
      }
    } else {
      if (system) {
        events_dropped_.fetch_add(1);
      } else {
        ingestor_->note_dropped(r->sensor_id, acq::DropReason::kDiskFull);
      }
      const std::string detail = res.status == rec::AppendStatus::kDiskFull ? "disk full" : res.error;
      health_->signal_fault(kSystemSensorId, FaultKind::kDiskFull, detail, clock_.mono_ns());
    }
    pending_.fetch_sub(1);
  }
}

void Daemon::maintenance_loop(std::stop_token stop) {
  std::int64_t next_disk = 0;
  std::int64_t next_panel = 0;
  const auto panel_period = static_cast<std::int64_t>(1e9 / config_.daemon.snapshot_hz);
  while (!stop.stop_requested()) {
    const std::int64_t now = clock_.mono_ns();
    if (now >= next_disk) {
      next_disk = now + kDiskSampleNs;
      std::error_code ec;
      const auto space = fs::space(config_.recorder.root, ec);
      health_->observe_disk_free(ec ? 0 : space.available, now);
    }
    {
      std::shared_lock gate(gate_mu_);
      acq::PairingOutput<PairedFrame> out;
      {
        std::lock_guard pl(pair_mu_);
        out = pairer_->expire(now);
      }
      handle_pairing(std::move(out), now, clock_.wall_ns());
    }
    health_->tick(now);
    if (panel_ && now >= next_panel) {
      next_panel = now + panel_period;
      panel_->publish(health_->snapshot());
    }
    std::this_thread::sleep_for(std::chrono::nanoseconds(kTickNs));
  }
}

void Daemon::correct_pose(const odom::PoseCorrection& c) { odom_.correct(c); }

health::StatusSnapshot Daemon::snapshot() const { return health_->snapshot(); }

acq::IngestStats Daemon::stats() const { return ingestor_->stats(); }

acq::PairingStats Daemon::pairing() const {
  std::lock_guard pl(pair_mu_);
  return pairer_->stats();
}

odom::OdomState Daemon::odometry() const { return odom_.state(); }

trigger::TriggerConfig Daemon::trigger_config() const { return trigger_ ? trigger_->config() : config_.trigger; }

bool Daemon::session_open() const {
  std::shared_lock gate(gate_mu_);
  return session_open_;
}

std::optional<fs::path> Daemon::session_directory() const {
  std::lock_guard wl(writer_mu_);
  if (!writer_) return std::nullopt;
  return writer_->directory();
}

std::optional<SessionSummary> Daemon::last_session() const {
  std::lock_guard wl(writer_mu_);
  return last_session_;
}

std::optional<sim::Frame> Daemon::latest_frame(sim::CameraId side) const {
  Bytes raw;
  {
    std::lock_guard lock(preview_mu_);
    raw = latest_raw_[side_index(side)];
  }
  if (raw.empty()) return std::nullopt;
  try {
    return sim::decode_frame_payload(raw);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::vector<Bytes> Daemon::latest_lidar_packets() const {
  std::lock_guard lock(preview_mu_);
  return {lidar_ring_.begin(), lidar_ring_.end()};
}

Daemon::Source* Daemon::source(SensorId id) {
  for (auto& s : sources_) {
    if (s->desc.id == id) return s.get();
  }
  return nullptr;
}

void Daemon::kill_source(SensorId id) {
  std::lock_guard lock(cmd_mu_);
  if (Source* s = source(id)) {
    killed_.insert(id);
    s->pause();
  }
}

void Daemon::restore_source(SensorId id) {
  std::lock_guard lock(cmd_mu_);
  Source* s = source(id);
  if (!s || !killed_.erase(id)) return;
  if (health_->state(id) != health::SensorState::kOff) s->resume();
}

void Daemon::set_writer_stall(bool stalled) { writer_stalled_.store(stalled); }

void Daemon::set_camera_temperature(SensorId id, float celsius) {
  if (Source* s = source(id); s && s->camera) s->camera->set_temperature(celsius);
}

void Daemon::set_lidar_obstructed(bool on) {
  for (auto& s : sources_) {
    if (s->lidar) s->lidar->set_obstructed(on);
  }
}

void Daemon::set_gnss_denied(bool on) {
  for (auto& s : sources_) {
    if (s->gnss) s->gnss->set_denied(on);
  }
}

void Daemon::drop_camera_frames(SensorId id, std::uint32_t n) {
  if (Source* s = source(id); s && s->camera) s->camera->drop_next(n);
}

}  // namespace fieldpack::daemon
