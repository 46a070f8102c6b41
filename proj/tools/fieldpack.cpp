// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// fieldpack -- command line front end.
//
//   fieldpack run --config FILE [--sim] [--duration S]
//   fieldpack budget --config FILE [--format table|json]
//   fieldpack replay DIR [--sensor NAME] [--verify] [--format table|json]
//
// Exit codes: 0 success, 1 analysis or verification failure, 2 usage or
// configuration error.

#include <signal.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fieldpack/api/server.hpp"
#include "fieldpack/budget/budget.hpp"
#include "fieldpack/config/config.hpp"
#include "fieldpack/daemon/daemon.hpp"
#include "fieldpack/recorder/replay.hpp"
#include "json.hpp"

using namespace fieldpack;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void print_stats(const acq::IngestStats& stats, std::ostream& out) {
  char line[200];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %8s %14s %10s %12s\n", "sensor", "ingested", "recorded",
                "dropped", "bytes", "rate_hz", "Mb/s");
  out << line;
  for (const auto& s : stats) {
    std::snprintf(line, sizeof line, "%-10s %10llu %10llu %8llu %14llu %10.2f %12.3f\n", s.name.c_str(),
                  static_cast<unsigned long long>(s.ingested_count), static_cast<unsigned long long>(s.recorded_count),
                  static_cast<unsigned long long>(s.dropped_count), static_cast<unsigned long long>(s.bytes_in),
                  s.measured_rate_hz, s.measured_bandwidth_bps / 1e6);
    out << line;
  }
}

struct RunArgs {
  std::string config;
  bool sim = false;
  double duration_s = 0.0;  // 0: until SIGINT/SIGTERM
  std::optional<std::string> root;
  std::optional<int> port;
  bool no_api = false;
};

int cmd_run(const RunArgs& a) {
  config::RigConfig cfg;
  try {
    cfg = config::load_config(a.config);
    config::validate_for_run(cfg);
  } catch (const config::ConfigError& e) {
    std::cerr << "fieldpack: invalid config: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!a.sim) {
    std::cerr << "fieldpack: this build has no hardware drivers; pass --sim to run simulated sources\n";
    return kExitUsage;
  }
  if (a.root) cfg.recorder.root = *a.root;
  if (a.port) cfg.api.port = static_cast<std::uint16_t>(*a.port);
  if (a.no_api) cfg.api.enabled = false;

  // Block the stop signals before any thread starts so only sigtimedwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  std::optional<daemon::Daemon> d;
  try {
    d.emplace(cfg);
  } catch (const config::ConfigError& e) {
    std::cerr << "fieldpack: invalid config: " << e.what() << "\n";
    return kExitUsage;
  }
  std::optional<api::ApiServer> server;
  d->start();
  if (cfg.api.enabled) {
    server.emplace(*d, cfg.api);
    try {
      server->start();
      std::cerr << "fieldpack: control API on " << cfg.api.bind << ":" << server->port() << "\n";
    } catch (const std::system_error& e) {
      std::cerr << "fieldpack: " << e.what() << "\n";
      d->stop();
      return kExitUsage;
    }
  }
  if (const auto dir = d->session_directory()) std::cerr << "fieldpack: recording to " << dir->string() << "\n";

  const auto start = std::chrono::steady_clock::now();
  const auto limit = std::chrono::duration<double>(a.duration_s);
  while (true) {
    if (a.duration_s > 0 && std::chrono::steady_clock::now() - start >= limit) break;
    timespec ts{0, 100'000'000};
    const int sig = sigtimedwait(&stop_signals, nullptr, &ts);
    if (sig == SIGINT || sig == SIGTERM) {
      std::cerr << "fieldpack: " << (sig == SIGINT ? "SIGINT" : "SIGTERM") << ", stopping\n";
      break;
    }
  }
  if (server) server->stop();
  d->stop();

  if (const auto s = d->last_session()) {
    std::cout << "session " << s->id.hex() << " in " << s->directory.string() << "\n";
    std::cout << "duration " << fmt("%.2f", s->duration_s) << " s, " << s->segments << " segment(s), "
              << s->bytes_written << " bytes, " << s->events_recorded << " event records\n";
    std::cout << "pairs " << s->pairing.pairs << ", dropouts left " << s->pairing.dropouts_left << ", right "
              << s->pairing.dropouts_right << "\n";
    print_stats(s->stats, std::cout);
  } else {
    std::cout << "no session recorded\n";
    print_stats(d->stats(), std::cout);
  }
  return kExitOk;
}

int cmd_budget(const std::string& path, const std::string& format) {
  config::RigConfig cfg;
  try {
    cfg = config::load_config(path);
  } catch (const config::ConfigError& e) {
    std::cerr << "fieldpack: invalid config: " << e.what() << "\n";
    return kExitUsage;
  }
  budget::BudgetReport report;
  try {
    report = budget::analyze(cfg.topology);
  } catch (const budget::TopologyError& e) {
    std::cerr << "fieldpack: topology error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const budget::InputError& e) {
    std::cerr << "fieldpack: invalid budget input: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << (format == "json" ? budget::format_json(report) : budget::format_table(report));
  if (format == "json") std::cout << "\n";
  return report.any_violation() ? kExitFailure : kExitOk;
}

struct ReplayArgs {
  std::string dir;
  std::optional<std::string> sensor;
  bool verify = false;
  std::string format = "table";
};

int cmd_replay(const ReplayArgs& a) {
  if (!std::filesystem::is_directory(a.dir)) {
    std::cerr << "fieldpack: not a directory: " << a.dir << "\n";
    return kExitUsage;
  }
  rec::ReplayOptions opts;
  opts.sensor = a.sensor;
  const auto r = rec::replay_session(a.dir, opts);
  if (a.sensor) {
    bool known = false;
    for (const auto& s : r.manifest.sensors) known = known || s.name == *a.sensor;
    if (!known && !r.manifest.sensors.empty()) {
      std::cerr << "fieldpack: sensor '" << *a.sensor << "' is not in the session manifest\n";
      return kExitUsage;
    }
  }

  if (a.format == "json") {
    json sensors = json::array();
    for (const auto& [id, s] : r.per_sensor) {
      sensors.push_back({{"id", id},
                         {"name", s.name},
                         {"records", s.records},
                         {"bytes", s.bytes},
                         {"first_mono_ns", s.first_mono_ns},
                         {"last_mono_ns", s.last_mono_ns},
                         {"rate_hz", s.rate_hz()}});
    }
    json issues = json::array();
    for (const auto& i : r.issues) {
      issues.push_back({{"path", i.path.string()},
                        {"kind", std::string(rec::to_string(i.kind))},
                        {"offset", i.offset},
                        {"detail", i.detail}});
    }
    json segments = json::array();
    for (const auto& p : r.segments) segments.push_back(p.filename().string());
    std::cout << json{{"session", r.manifest.session.hex()},
                      {"segments", segments},
                      {"total_records", r.total_records},
                      {"sensors", sensors},
                      {"issues", issues},
                      {"clean", r.clean()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "session " << r.manifest.session.hex() << ", " << r.segments.size() << " segment(s), "
              << r.total_records << " record(s)" << (a.sensor ? " for " + *a.sensor : std::string()) << "\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-10s %10s %14s %10s %10s\n", "sensor", "records", "bytes", "rate_hz",
                  "span_s");
    std::cout << line;
    for (const auto& [id, s] : r.per_sensor) {
      std::snprintf(line, sizeof line, "%-10s %10llu %14llu %10.2f %10.3f\n", s.name.c_str(),
                    static_cast<unsigned long long>(s.records), static_cast<unsigned long long>(s.bytes),
                    s.rate_hz(), static_cast<double>(s.last_mono_ns - s.first_mono_ns) / 1e9);
      std::cout << line;
    }
    if (a.verify) {
      for (const auto& p : r.segments) std::cout << "segment " << p.filename().string() << "\n";
    }
    if (r.clean()) {
      std::cout << "verify: OK, every record CRC checked\n";
    } else {
      std::cout << "verify: " << r.issues.size() << " issue(s)\n";
      for (const auto& i : r.issues) {
        std::cout << "  " << i.path.filename().string() << " offset " << i.offset << ": " << rec::to_string(i.kind)
                  << " (" << i.detail << ")\n";
      }
    }
  }
  return r.clean() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fieldpack: field data acquisition"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the acquisition daemon");
  run_cmd->add_option("--config", run.config, "Rig configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_flag("--sim", run.sim, "Use simulated sources");
  run_cmd->add_option("--duration", run.duration_s, "Stop after this many seconds (default: until SIGINT)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--root", run.root, "Override the recorder root directory");
  run_cmd->add_option("--port", run.port, "Override the control API port (0: ephemeral)")->check(CLI::Range(0, 65535));
  run_cmd->add_flag("--no-api", run.no_api, "Disable the control API");

  std::string budget_config;
  std::string budget_format = "table";
  auto* budget_cmd = app.add_subcommand("budget", "Check link bandwidth, power and battery runtime");
  budget_cmd->add_option("--config", budget_config, "Rig configuration file")->required()->check(CLI::ExistingFile);
  budget_cmd->add_option("--format", budget_format, "Output format")->check(CLI::IsMember({"table", "json"}));

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Read back and verify a recorded session");
  replay_cmd->add_option("session-dir", replay.dir, "Session directory")->required();
  replay_cmd->add_option("--sensor", replay.sensor, "Count only this sensor");
  replay_cmd->add_flag("--verify", replay.verify, "List every verified segment");
  replay_cmd->add_option("--format", replay.format, "Output format")->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*budget_cmd) return cmd_budget(budget_config, budget_format);
    if (*replay_cmd) return cmd_replay(replay);
  } catch (const std::exception& e) {
    std::cerr << "fieldpack: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
