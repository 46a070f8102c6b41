// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// session.hpp -- session directory, manifest, segment rolling and the append
// path.
//
// Layout: <root>/<session-id>/manifest.txt plus 000001.fpk, 000002.fpk, ...
// All sensors share one interleaved stream; no record spans two files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fieldpack/acquisition/records.hpp"
#include "fieldpack/recorder/format.hpp"

namespace fieldpack::rec {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultRollThreshold = 512ULL << 20;
constexpr std::uint64_t kDefaultLowWaterBytes = 2ULL << 30;

struct Manifest {
  SessionId session;
  std::int64_t start_wall_ns = 0;
  std::vector<SensorDescriptor> sensors;
};

constexpr std::string_view kManifestName = "manifest.txt";

// Plain text, one "key value" per line, closed by a crc32 line over all
// preceding bytes.
std::string format_manifest(const Manifest& m);

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Manifest parse_manifest(std::string_view text);  // throws ManifestError
Manifest read_manifest(const fs::path& session_dir);

std::string segment_name(std::uint32_t seq);  // "000001.fpk"

// Free bytes available to an unprivileged writer; throws fs::filesystem_error
// if the path is gone.
std::uint64_t disk_free(const fs::path& path);

struct SessionOptions {
  std::uint64_t roll_threshold_bytes = kDefaultRollThreshold;
  // Fault injection: behave as if the disk filled up after this many bytes.
  std::optional<std::uint64_t> simulated_capacity_bytes;
};

enum class AppendStatus { kOk, kDiskFull, kIoError };

struct AppendResult {
  AppendStatus status = AppendStatus::kOk;
  std::uint64_t offset = 0;   // start of the record within its segment
  std::uint32_t segment = 0;  // 1-based segment number
  std::string error;
  bool ok() const { return status == AppendStatus::kOk; }
};

class RecorderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-writer owner of the open segment. Not thread-safe.
class SessionWriter {
 public:
  // Creates <root>/<id>/, writes the manifest and opens 000001.fpk.
  // Throws RecorderError on filesystem failure.
  SessionWriter(const fs::path& root, Manifest manifest, SessionOptions options = {});
  ~SessionWriter();

  SessionWriter(const SessionWriter&) = delete;
  SessionWriter& operator=(const SessionWriter&) = delete;

  // Rolls first if the open segment has reached the threshold. A failed
  // append leaves the segment exactly as it was.
  AppendResult append(const StampedRecord& record);

  // Closes (fsync) the current segment and opens the next. Throws
  // RecorderError on failure, after which the writer is unusable.
  fs::path roll_segment();

  // Flushes and closes the open segment.
  void close();

  const fs::path& directory() const { return dir_; }
  const Manifest& manifest() const { return manifest_; }
  std::uint32_t segment_seq() const { return seq_; }
  std::uint64_t segment_size() const { return size_; }
  std::uint64_t bytes_written() const { return total_; }
  std::uint64_t records_written() const { return records_; }
  bool failed() const { return failed_; }

 private:
  void open_segment();

  fs::path dir_;
  Manifest manifest_;
  SessionOptions options_;
  int fd_ = -1;
  std::uint32_t seq_ = 0;
  std::uint64_t size_ = 0;
  std::uint64_t total_ = 0;
  std::uint64_t records_ = 0;
  bool failed_ = false;
  Bytes scratch_;
};

}  // namespace fieldpack::rec
