// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/recorder/session.hpp"

#include <fcntl.h>
#include <sys/statvfs.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace fieldpack::rec {

namespace {

std::string utc_iso8601(std::int64_t wall_ns) {
  const std::time_t secs = static_cast<std::time_t>(wall_ns / 1'000'000'000LL);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string crc_hex(std::string_view text) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08X", crc32_ieee(as_bytes(text)));
  return buf;
}

bool write_fully(int fd, const std::uint8_t* data, std::size_t n, int& err) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      err = errno;
      return false;
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

}  // namespace

std::string format_manifest(const Manifest& m) {
  std::ostringstream os;
  os << "fieldpack-session 1\n";
  os << "session_id " << m.session.hex() << "\n";
  os << "start_wall_ns " << m.start_wall_ns << "\n";
  os << "start_wall_utc " << utc_iso8601(m.start_wall_ns) << "\n";
  for (const auto& s : m.sensors) {
    char rate[64];
    char timeout[64];
    std::snprintf(rate, sizeof rate, "%.17g", s.nominal_rate_hz);
    std::snprintf(timeout, sizeof timeout, "%.17g", s.silence_timeout_ms);
    os << "sensor " << static_cast<int>(s.id) << " " << s.name << " " << to_string(s.kind) << " "
       << rate << " " << timeout << "\n";
  }
  std::string body = os.str();
  return body + "crc32 " + crc_hex(body) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  const std::size_t crc_at = text.rfind("crc32 ");
  if (crc_at == std::string_view::npos || (crc_at > 0 && text[crc_at - 1] != '\n')) {
    throw ManifestError("manifest has no crc32 line");
  }
  std::string_view crc_line = text.substr(crc_at + 6);
  if (crc_line.size() != 9 || crc_line.back() != '\n') {
    throw ManifestError("malformed manifest crc32 line");
  }
  crc_line.remove_suffix(1);
  const std::string_view body = text.substr(0, crc_at);
  if (crc_hex(body) != crc_line) throw ManifestError("manifest crc32 mismatch");

  Manifest m;
  bool have_id = false;
  std::istringstream is{std::string(body)};
  std::string line;
  std::getline(is, line);
  if (line != "fieldpack-session 1") throw ManifestError("not a fieldpack session manifest");
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "session_id") {
      std::string hex;
      ls >> hex;
      auto id = SessionId::from_hex(hex);
      if (!id) throw ManifestError("bad session id in manifest");
      m.session = *id;
      have_id = true;
    } else if (key == "start_wall_ns") {
      ls >> m.start_wall_ns;
    } else if (key == "sensor") {
      int id = 0;
      std::string name, kind;
      SensorDescriptor d;
      ls >> id >> name >> kind >> d.nominal_rate_hz >> d.silence_timeout_ms;
      auto k = parse_sensor_kind(kind);
      if (!ls || !k || id < 0 || id > 254) throw ManifestError("bad sensor line: " + line);
      d.id = static_cast<SensorId>(id);
      d.name = name;
      d.kind = *k;
      m.sensors.push_back(d);
    }
  }
  if (!have_id) throw ManifestError("manifest lacks a session id");
  return m;
}

Manifest read_manifest(const fs::path& session_dir) {
  std::ifstream in(session_dir / kManifestName, std::ios::binary);
  if (!in) throw ManifestError("no manifest in " + session_dir.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

std::string segment_name(std::uint32_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06u.fpk", seq);
  return buf;
}

std::uint64_t disk_free(const fs::path& path) { return fs::space(path).available; }

SessionWriter::SessionWriter(const fs::path& root, Manifest manifest, SessionOptions options)
    : dir_(root / manifest.session.hex()), manifest_(std::move(manifest)), options_(options) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw RecorderError("cannot create session directory " + dir_.string() + ": " + ec.message());
  {
    std::ofstream out(dir_ / kManifestName, std::ios::binary | std::ios::trunc);
    out << format_manifest(manifest_);
    out.flush();
    if (!out) throw RecorderError("cannot write manifest in " + dir_.string());
  }
  open_segment();
}

SessionWriter::~SessionWriter() { close(); }

void SessionWriter::open_segment() {
  ++seq_;
  const fs::path path = dir_ / segment_name(seq_);
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    failed_ = true;
    throw RecorderError("cannot open segment " + path.string() + ": " + std::strerror(errno));
  }
  const Bytes header = encode_segment_header(manifest_.session);
  int err = 0;
  if (!write_fully(fd_, header.data(), header.size(), err)) {
    failed_ = true;
    throw RecorderError("cannot write segment header: " + std::string(std::strerror(err)));
  }
  size_ = header.size();
  total_ += header.size();
}

fs::path SessionWriter::roll_segment() {
  if (failed_) throw RecorderError("session writer is in a failed state");
  if (fd_ >= 0) {
    if (::fsync(fd_) != 0 || ::close(fd_) != 0) {
      fd_ = -1;
      failed_ = true;
      throw RecorderError("closing segment failed: " + std::string(std::strerror(errno)));
    }
    fd_ = -1;
  }
  open_segment();
  return dir_ / segment_name(seq_);
}

AppendResult SessionWriter::append(const StampedRecord& record) {
  AppendResult res;
  if (failed_ || fd_ < 0) {
    res.status = AppendStatus::kIoError;
    res.error = "session writer is closed or failed";
    return res;
  }
  if (size_ >= options_.roll_threshold_bytes) {
    try {
      roll_segment();
    } catch (const RecorderError& e) {
      res.status = AppendStatus::kIoError;
      res.error = e.what();
      return res;
    }
  }
  scratch_.clear();
  encode_record(record, scratch_);
  res.segment = seq_;
  res.offset = size_;
  if (options_.simulated_capacity_bytes && total_ + scratch_.size() > *options_.simulated_capacity_bytes) {
    res.status = AppendStatus::kDiskFull;
    res.error = "no space left on device (simulated)";
    return res;
  }
  int err = 0;
  if (!write_fully(fd_, scratch_.data(), scratch_.size(), err)) {
    // Cut any partial frame so the segment stays a sequence of whole records.
    if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0 ||
        ::lseek(fd_, static_cast<off_t>(size_), SEEK_SET) < 0) {
      failed_ = true;
    }
    res.status = err == ENOSPC || err == EDQUOT ? AppendStatus::kDiskFull : AppendStatus::kIoError;
    res.error = std::strerror(err);
    return res;
  }
  size_ += scratch_.size();
  total_ += scratch_.size();
  ++records_;
  return res;
}

void SessionWriter::close() {
  if (fd_ < 0) return;
  ::fsync(fd_);
  ::close(fd_);
  fd_ = -1;
}

}  // namespace fieldpack::rec
