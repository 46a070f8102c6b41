// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "temp_dir.hpp"

extern char** environ;

using json = nlohmann::json;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = FIELDPACK_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Proc {
  pid_t pid = -1;
  fs::path out;
  fs::path err;
};

Proc spawn(const testutil::TempDir& dir, const std::vector<std::string>& args, const std::string& tag) {
  Proc p;
  p.out = dir.path() / (tag + ".out");
  p.err = dir.path() / (tag + ".err");
  std::vector<std::string> argv_s{FIELDPACK_CLI};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 1, p.out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&fa, 2, p.err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  REQUIRE(posix_spawn(&p.pid, argv[0], &fa, nullptr, argv.data(), environ) == 0);
  posix_spawn_file_actions_destroy(&fa);
  return p;
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result wait(const Proc& p) {
  int status = 0;
  REQUIRE(::waitpid(p.pid, &status, 0) == p.pid);
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  r.out = slurp(p.out);
  r.err = slurp(p.err);
  return r;
}

Result run(const testutil::TempDir& dir, const std::vector<std::string>& args) {
  static int n = 0;
  return wait(spawn(dir, args, "cmd" + std::to_string(n++)));
}

fs::path only_session(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  REQUIRE(dirs.size() == 1);
  return dirs.front();
}

// sensor name -> recorded count, read back from the stats table the run prints.
std::map<std::string, std::uint64_t> recorded_from_table(const std::string& out) {
  std::map<std::string, std::uint64_t> m;
  std::istringstream in(out);
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name == "sensor") {
      in_table = true;
      continue;
    }
    if (!in_table || name.empty()) continue;
    std::uint64_t ingested = 0;
    std::uint64_t recorded = 0;
    ls >> ingested >> recorded;
    m[name] = recorded;
  }
  return m;
}

fs::path write_file(const testutil::TempDir& dir, const std::string& name, const std::string& text) {
  const auto p = dir.path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("budget: shipped backpack rigs") {
  testutil::TempDir dir;
  auto r = run(dir, {"budget", "--config", (kConfigs / "backpack_rig_1gbe.toml").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("OVERSUBSCRIBED") != std::string::npos);
  CHECK(r.out.find("79.00 W") != std::string::npos);

  r = run(dir, {"budget", "--config", (kConfigs / "backpack_rig_10gbe.toml").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("OVERSUBSCRIBED") == std::string::npos);

  r = run(dir, {"budget", "--config", (kConfigs / "backpack_rig_1gbe.toml").string(), "--format", "json"});
  CHECK(r.code == 1);
  const auto j = json::parse(r.out);
  CHECK(j["violation"] == true);
  CHECK(j["power"]["total_w"].get<double>() == doctest::Approx(79.0));
}

TEST_CASE("budget: empty flows and a route over a missing link") {
  testutil::TempDir dir;
  const auto empty = write_file(dir, "empty.toml", R"(
name = "bench"
[topology]
nodes = ["a", "b"]
[[topology.link]]
name = "ab"
a = "a"
b = "b"
capacity_mbps = 100
)");
  auto r = run(dir, {"budget", "--config", empty.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("0.0%") != std::string::npos);

  const auto broken = write_file(dir, "broken.toml", R"(
name = "bench"
[topology]
nodes = ["a", "b", "c"]
[[topology.link]]
name = "ab"
a = "a"
b = "b"
capacity_mbps = 100
[[topology.flow]]
name = "f"
source = "a"
sink = "c"
rate_mbps = 10
route = ["ab", "bc"]
)");
  r = run(dir, {"budget", "--config", broken.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bc") != std::string::npos);
}

TEST_CASE("run: duplicate sensor id exits 2 naming both sensors") {
  testutil::TempDir dir;
  std::string text = slurp(kConfigs / "desk_sim.toml");
  const auto pos = text.find("id = 2");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, "id = 1");
  const auto cfg = write_file(dir, "dup.toml", text);
  const auto r = run(dir, {"run", "--config", cfg.string(), "--sim", "--duration", "1", "--no-api"});
  CHECK(r.code == 2);
  CHECK(r.err.find("duplicate sensor id 1") != std::string::npos);
  CHECK(r.err.find("CAM_L") != std::string::npos);
  CHECK(r.err.find("CAM_R") != std::string::npos);
}

TEST_CASE("run 10 s, replay matches the recorded counts, then a flipped byte is caught") {
  testutil::TempDir dir;
  const auto root = dir.path() / "sessions";
  const auto r = run(dir, {"run", "--config", (kConfigs / "desk_sim.toml").string(), "--sim", "--duration", "10",
                           "--root", root.string(), "--port", "0"});
  REQUIRE(r.code == 0);
  const auto recorded = recorded_from_table(r.out);
  REQUIRE(recorded.size() == 5);
  const auto session = only_session(root);
  std::vector<fs::path> segments;
  for (const auto& e : fs::directory_iterator(session))
    if (e.path().extension() == ".fpk") segments.push_back(e.path());
  CHECK(segments.size() >= 1);

  auto rp = run(dir, {"replay", session.string(), "--verify", "--format", "json"});
  CHECK(rp.code == 0);
  auto j = json::parse(rp.out);
  CHECK(j["clean"] == true);
  for (const auto& s : j["sensors"]) {
    const auto name = s["name"].get<std::string>();
    if (name == "EVENT") continue;
    INFO(name);
    CHECK(s["records"].get<std::uint64_t>() == recorded.at(name));
  }

  rp = run(dir, {"replay", session.string(), "--sensor", "LIDAR", "--format", "json"});
  CHECK(rp.code == 0);
  j = json::parse(rp.out);
  REQUIRE(j["sensors"].size() == 1);
  CHECK(j["sensors"][0]["name"] == "LIDAR");
  CHECK(j["total_records"].get<std::uint64_t>() == recorded.at("LIDAR"));

  // Walk the record framing independently to find which record a byte
  // falls in: u8 id, u8 type, u32 payload_len, two u64 stamps, payload, u32 crc.
  std::sort(segments.begin(), segments.end());
  const auto seg = segments.front();
  std::string bytes = slurp(seg);
  const std::size_t target = bytes.size() / 2;
  std::size_t off = 26;
  std::size_t record_start = 0;
  while (off < bytes.size()) {
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 2 + i])) << (8 * i);
    const std::size_t end = off + 22 + len + 4;
    if (target >= off && target < end) {
      record_start = off;
      break;
    }
    off = end;
  }
  REQUIRE(record_start > 0);
  bytes[target] = static_cast<char>(bytes[target] ^ 0x10);
  std::ofstream(seg, std::ios::binary | std::ios::trunc) << bytes;

  rp = run(dir, {"replay", session.string(), "--verify"});
  CHECK(rp.code == 1);
  CHECK(rp.out.find("offset " + std::to_string(record_start)) != std::string::npos);
}

TEST_CASE("run: SIGINT stops cleanly with the segment flushed") {
  testutil::TempDir dir;
  const auto root = dir.path() / "sessions";
  const auto p = spawn(dir,
                       {"run", "--config", (kConfigs / "desk_sim.toml").string(), "--sim", "--root", root.string(),
                        "--no-api"},
                       "sigint");
  std::this_thread::sleep_for(2500ms);
  ::kill(p.pid, SIGINT);
  const auto r = wait(p);
  CHECK(r.code == 0);
  CHECK(r.err.find("SIGINT") != std::string::npos);
  const auto recorded = recorded_from_table(r.out);
  REQUIRE(recorded.count("LIDAR") == 1);
  CHECK(recorded.at("LIDAR") > 0);
  const auto rp = run(dir, {"replay", only_session(root).string(), "--format", "json"});
  CHECK(rp.code == 0);
  for (const auto& s : json::parse(rp.out)["sensors"]) {
    const auto name = s["name"].get<std::string>();
    if (name != "EVENT") CHECK(s["records"].get<std::uint64_t>() == recorded.at(name));
  }
}

TEST_CASE("usage errors exit 2") {
  testutil::TempDir dir;
  CHECK(run(dir, {}).code == 2);
  CHECK(run(dir, {"budget"}).code == 2);
  CHECK(run(dir, {"replay", (dir.path() / "missing").string()}).code == 2);
  CHECK(run(dir, {"run", "--config", (kConfigs / "desk_sim.toml").string(), "--duration", "1"}).code == 2);
  CHECK(run(dir, {"--help"}).code == 0);
}
