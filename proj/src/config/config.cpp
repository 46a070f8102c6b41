// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/config/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "fieldpack/acquisition/ingest.hpp"

namespace fieldpack::config {

namespace {

// A table view that remembers which keys were read so unknown keys (usually
// typos) can be reported.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool present() const { return table_ != nullptr; }
  const std::string& path() const { return path_; }

  std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

  const toml::node* node(std::string_view k) {
    used_.insert(std::string(k));
    return table_ ? table_->get(k) : nullptr;
  }

  double number(std::string_view k, double def) {
    const toml::node* n = node(k);
    if (!n) return def;
    if (auto v = n->value_exact<double>()) return check_finite(k, *v);
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw ConfigError(key(k) + ": expected a number");
  }

  std::int64_t integer(std::string_view k, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    const toml::node* n = node(k);
    if (!n) return def;
    auto v = n->value_exact<std::int64_t>();
    if (!v) throw ConfigError(key(k) + ": expected an integer");
    if (*v < lo || *v > hi) {
      throw ConfigError(key(k) + ": " + std::to_string(*v) + " is outside [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    return *v;
  }

  std::string text(std::string_view k, std::string def) {
    const toml::node* n = node(k);
    if (!n) return def;
    auto v = n->value_exact<std::string>();
    if (!v) throw ConfigError(key(k) + ": expected a string");
    return *v;
  }

  bool flag(std::string_view k, bool def) {
    const toml::node* n = node(k);
    if (!n) return def;
    auto v = n->value_exact<bool>();
    if (!v) throw ConfigError(key(k) + ": expected true or false");
    return *v;
  }

  Eigen::Vector3d vec3(std::string_view k, Eigen::Vector3d def) {
    const toml::node* n = node(k);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a || a->size() != 3) throw ConfigError(key(k) + ": expected an array of three numbers");
    Eigen::Vector3d out;
    for (std::size_t i = 0; i < 3; ++i) {
      const toml::node& e = *a->get(i);
      if (auto d = e.value_exact<double>()) {
        out[static_cast<Eigen::Index>(i)] = check_finite(k, *d);
      } else if (auto n2 = e.value_exact<std::int64_t>()) {
        out[static_cast<Eigen::Index>(i)] = static_cast<double>(*n2);
      } else {
        throw ConfigError(key(k) + ": expected an array of three numbers");
      }
    }
    return out;
  }

  std::vector<std::string> strings(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return {};
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key(k) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *a) {
      auto s = e.value_exact<std::string>();
      if (!s) throw ConfigError(key(k) + ": expected an array of strings");
      out.push_back(*s);
    }
    return out;
  }

  Section sub(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return {nullptr, key(k)};
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError(key(k) + ": expected a table");
    return {t, key(k)};
  }

  std::vector<Section> array_of_tables(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return {};
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key(k) + ": expected an array of tables ([[" + key(k) + "]])");
    std::vector<Section> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      const toml::table* t = a->get(i)->as_table();
      if (!t) throw ConfigError(key(k) + ": expected an array of tables ([[" + key(k) + "]])");
      out.emplace_back(t, key(k) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      if (!used_.contains(std::string(k.str()))) throw ConfigError("unknown key '" + key(k.str()) + "'");
    }
  }

 private:
  double check_finite(std::string_view k, double v) const {
    if (!std::isfinite(v)) throw ConfigError(key(k) + ": must be finite");
    return v;
  }

  const toml::table* table_;
  std::string path_;
  std::set<std::string> used_;
};

std::int64_t seconds_to_ns(double s) { return static_cast<std::int64_t>(std::llround(s * 1e9)); }

void parse_sensors(Section& root, RigConfig& cfg) {
  for (Section s : root.array_of_tables("sensor")) {
    SensorDescriptor d;
    d.id = static_cast<SensorId>(s.integer("id", -1, 0, 255));
    if (!s.node("id")) throw ConfigError(s.path() + ": missing 'id'");
    d.name = s.text("name", "");
    const std::string kind = s.text("kind", "");
    std::string upper = kind;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto k = parse_sensor_kind(upper);
    if (!k) throw ConfigError(s.key("kind") + ": unknown sensor kind '" + kind + "'");
    d.kind = *k;
    d.nominal_rate_hz = s.number("rate_hz", 0.0);
    d.silence_timeout_ms = s.number("silence_timeout_ms", 0.0);
    if (d.kind == SensorKind::kCamera) {
      const std::string side = s.text("side", "");
      if (side == "left") {
        cfg.camera_sides[d.id] = sim::CameraId::kLeft;
      } else if (side == "right") {
        cfg.camera_sides[d.id] = sim::CameraId::kRight;
      } else {
        throw ConfigError(s.key("side") + ": camera side must be \"left\" or \"right\"");
      }
    }
    s.finish();
    cfg.sensors.push_back(d);
  }
  try {
    acq::validate_descriptors(cfg.sensors);
  } catch (const acq::DescriptorError& e) {
    throw ConfigError(std::string("sensor: ") + e.what());
  }
  std::set<sim::CameraId> sides;
  for (const auto& [id, side] : cfg.camera_sides) {
    if (!sides.insert(side).second) {
      throw ConfigError(std::string("sensor: two cameras declared on the ") + std::string(sim::camera_name(side)) +
                        " side");
    }
  }
}

void parse_trigger(Section s, RigConfig& cfg) {
  cfg.trigger.fps = s.number("fps", cfg.trigger.fps);
  cfg.trigger.exposure_us = static_cast<std::uint32_t>(s.integer("exposure_us", cfg.trigger.exposure_us, 0, 1LL << 31));
  s.finish();
  if (auto v = trigger::validate_config(cfg.trigger)) throw ConfigError("trigger: " + v->message);
}

void parse_sim(Section s, RigConfig& cfg) {
  SimSettings& sim = cfg.sim;
  sim.seed = static_cast<std::uint64_t>(s.integer("seed", 1, 0, INT64_MAX));
  Section cam = s.sub("camera");
  sim.camera.width = static_cast<std::uint32_t>(cam.integer("width", sim.camera.width, 16, 8192));
  sim.camera.height = static_cast<std::uint32_t>(cam.integer("height", sim.camera.height, 16, 8192));
  sim.camera.bit_depth = static_cast<std::uint32_t>(cam.integer("bit_depth", sim.camera.bit_depth, 8, 16));
  if (sim.camera.bit_depth != 8 && sim.camera.bit_depth != 12 && sim.camera.bit_depth != 16) {
    throw ConfigError(cam.key("bit_depth") + ": must be 8, 12 or 16");
  }
  sim.camera.disparity_px = static_cast<std::int32_t>(cam.integer("disparity_px", sim.camera.disparity_px, 0, 1024));
  sim.camera_temperature_c = static_cast<float>(cam.number("temperature_c", sim.camera_temperature_c));
  cam.finish();

  Section lidar = s.sub("lidar");
  sim.lidar.rotation_hz = lidar.number("rotation_hz", sim.lidar.rotation_hz);
  sim.lidar.azimuth_step_deg = lidar.number("azimuth_step_deg", sim.lidar.azimuth_step_deg);
  sim.lidar.seed = sim.seed;
  if (!(sim.lidar.rotation_hz > 0.0) || !(sim.lidar.azimuth_step_deg > 0.0)) {
    throw ConfigError(lidar.path() + ": rotation_hz and azimuth_step_deg must be positive");
  }
  lidar.finish();

  Section imu = s.sub("imu");
  const std::string profile = imu.text("profile", "stationary");
  if (profile == "stationary") {
    sim.imu_profile.kind = sim::MotionKind::kStationary;
  } else if (profile == "constant_accel") {
    sim.imu_profile.kind = sim::MotionKind::kConstantAccel;
  } else if (profile == "constant_turn") {
    sim.imu_profile.kind = sim::MotionKind::kConstantTurn;
  } else {
    throw ConfigError(imu.key("profile") + ": unknown motion profile '" + profile + "'");
  }
  sim.imu_profile.accel = imu.vec3("accel", Eigen::Vector3d::Zero());
  sim.imu_profile.yaw_rate = imu.number("yaw_rate", 0.0);
  sim.imu_profile.duration_s = imu.number("duration_s", 60.0);
  sim.imu_accel_bias = imu.vec3("accel_bias", Eigen::Vector3d::Zero());
  sim.imu_gyro_bias = imu.vec3("gyro_bias", Eigen::Vector3d::Zero());
  imu.finish();
  try {
    sim::validate_profile(sim.imu_profile);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(imu.path() + ": " + e.what());
  }

  Section gnss = s.sub("gnss");
  sim.gnss.latitude_deg = gnss.number("latitude_deg", sim.gnss.latitude_deg);
  sim.gnss.longitude_deg = gnss.number("longitude_deg", sim.gnss.longitude_deg);
  sim.gnss.altitude_m = gnss.number("altitude_m", sim.gnss.altitude_m);
  sim.gnss.satellites = static_cast<int>(gnss.integer("satellites", sim.gnss.satellites, 0, 99));
  sim.gnss.fix_quality = static_cast<int>(gnss.integer("fix_quality", sim.gnss.fix_quality, 0, 9));
  gnss.finish();
  s.finish();
}

void parse_thresholds(Section s, RigConfig& cfg) {
  health::Thresholds& t = cfg.thresholds;
  t.overheat_c = s.number("overheat_c", t.overheat_c);
  t.overheat_frames = static_cast<int>(s.integer("overheat_frames", t.overheat_frames, 1, 1000));
  t.obstruction_ratio = s.number("obstruction_ratio", t.obstruction_ratio);
  t.obstruction_range_m = s.number("obstruction_range_m", t.obstruction_range_m);
  t.obstruction_window_ns = seconds_to_ns(s.number("obstruction_window_s", 1.0));
  t.gnss_denied_ns = seconds_to_ns(s.number("gnss_denied_s", 10.0));
  t.clear_hold_ns = seconds_to_ns(s.number("clear_hold_s", 2.0));
  t.disk_low_bytes = static_cast<std::uint64_t>(s.integer("disk_low_mib", 2048, 0, 1LL << 40)) << 20;
  t.cal_duration_ns = seconds_to_ns(s.number("cal_duration_s", 10.0));
  s.finish();
  if (!(t.obstruction_ratio > 0.0 && t.obstruction_ratio <= 1.0)) {
    throw ConfigError(s.key("obstruction_ratio") + ": must be in (0, 1]");
  }
  if (t.obstruction_window_ns <= 0 || t.gnss_denied_ns <= 0 || t.clear_hold_ns < 0 || t.cal_duration_ns <= 0) {
    throw ConfigError(s.path() + ": durations must be positive");
  }
}

void parse_recorder(Section s, const std::filesystem::path& base, RigConfig& cfg) {
  RecorderSettings& r = cfg.recorder;
  std::filesystem::path root = s.text("root", "sessions");
  r.root = root.is_absolute() ? root : base / root;
  r.roll_threshold_bytes = static_cast<std::uint64_t>(s.integer("roll_threshold_mib", 512, 1, 1LL << 30)) << 20;
  r.queue_capacity = static_cast<std::size_t>(s.integer("queue_capacity", 4096, 1, 1LL << 24));
  if (s.node("simulated_capacity_mib")) {
    r.simulated_capacity_bytes =
        static_cast<std::uint64_t>(s.integer("simulated_capacity_mib", 0, 0, 1LL << 30)) << 20;
  }
  s.finish();
}

void parse_api(Section s, RigConfig& cfg) {
  ApiSettings& a = cfg.api;
  a.enabled = s.flag("enabled", a.enabled);
  a.bind = s.text("bind", a.bind);
  a.port = static_cast<std::uint16_t>(s.integer("port", a.port, 0, 65535));
  a.preview_hz = s.number("preview_hz", a.preview_hz);
  a.preview_max_width = static_cast<std::uint32_t>(s.integer("preview_max_width", a.preview_max_width, 16, 320));
  if (!(a.preview_hz > 0.0 && a.preview_hz <= 5.0)) throw ConfigError(s.key("preview_hz") + ": must be in (0, 5]");
  s.finish();
}

void parse_daemon(Section s, RigConfig& cfg) {
  DaemonSettings& d = cfg.daemon;
  d.autostart = s.flag("autostart", d.autostart);
  d.autorecord = s.flag("autorecord", d.autorecord);
  d.snapshot_hz = s.number("snapshot_hz", d.snapshot_hz);
  d.odom_event_hz = s.number("odom_event_hz", d.odom_event_hz);
  d.panel_device = s.text("panel_device", "");
  if (!(d.snapshot_hz >= 2.0)) throw ConfigError(s.key("snapshot_hz") + ": must be at least 2");
  if (!(d.odom_event_hz > 0.0)) throw ConfigError(s.key("odom_event_hz") + ": must be positive");
  s.finish();
}

void parse_topology(Section& root, RigConfig& cfg) {
  budget::RigTopology& t = cfg.topology;
  Section topo = root.sub("topology");
  t.nodes = topo.strings("nodes");
  for (Section l : topo.array_of_tables("link")) {
    budget::Link link;
    link.name = l.text("name", "");
    link.a = l.text("a", "");
    link.b = l.text("b", "");
    link.capacity_mbps = l.number("capacity_mbps", 0.0);
    l.finish();
    t.links.push_back(link);
  }
  for (Section f : topo.array_of_tables("flow")) {
    budget::Flow flow;
    flow.name = f.text("name", "");
    flow.source = f.text("source", "");
    flow.sink = f.text("sink", "");
    flow.rate_mbps = f.number("rate_mbps", 0.0);
    flow.route = f.strings("route");
    f.finish();
    t.flows.push_back(flow);
  }
  topo.finish();
  for (Section p : root.array_of_tables("power")) {
    budget::PowerComponent c;
    c.name = p.text("name", "");
    c.watts = p.number("watts", 0.0);
    p.finish();
    t.power.push_back(c);
  }
  for (Section b : root.array_of_tables("battery")) {
    budget::Battery bat;
    bat.name = b.text("name", "");
    bat.voltage_v = b.number("voltage_v", 0.0);
    bat.capacity_ah = b.number("capacity_ah", 0.0);
    b.finish();
    t.batteries.push_back(bat);
  }
}

}  // namespace

const SensorDescriptor* RigConfig::find(std::string_view n) const {
  for (const auto& d : sensors) {
    if (d.name == n) return &d;
  }
  return nullptr;
}

std::optional<SensorId> RigConfig::camera(sim::CameraId side) const {
  for (const auto& [id, s] : camera_sides) {
    if (s == side) return id;
  }
  return std::nullopt;
}

std::optional<SensorId> RigConfig::first_of(SensorKind kind) const {
  for (const auto& d : sensors) {
    if (d.kind == kind) return d.id;
  }
  return std::nullopt;
}

RigConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  RigConfig cfg;
  Section root(&doc, "");
  cfg.name = root.text("name", "");
  parse_sensors(root, cfg);
  parse_trigger(root.sub("trigger"), cfg);
  parse_sim(root.sub("sim"), cfg);
  parse_thresholds(root.sub("thresholds"), cfg);
  parse_recorder(root.sub("recorder"), base_dir, cfg);
  parse_api(root.sub("api"), cfg);
  parse_daemon(root.sub("daemon"), cfg);
  parse_topology(root, cfg);
  root.finish();
  return cfg;
}

RigConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  try {
    return parse_config(os.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate_for_run(const RigConfig& cfg) {
  if (cfg.sensors.empty()) throw ConfigError("no sensors declared");
  std::size_t cameras = 0;
  for (const auto& d : cfg.sensors) cameras += d.kind == SensorKind::kCamera;
  if (cameras != 0 && cameras != 2) throw ConfigError("a rig needs both stereo cameras (left and right) or none");
}

}  // namespace fieldpack::config
