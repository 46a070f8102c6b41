// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// replay.hpp -- validating readers for segments and whole sessions.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fieldpack/recorder/format.hpp"
#include "fieldpack/recorder/session.hpp"

namespace fieldpack::rec {

enum class IssueKind {
  kCrcMismatch,
  kTruncated,
  kBadRecord,      // CRC valid but the record cannot be a fieldpack record
  kNotALog,        // bad magic / version / short header
  kSessionMismatch,
  kManifest,
  kMissingSegment,
  kOrdering,       // per-sensor mono_ns went backwards
};

std::string_view to_string(IssueKind kind);

struct IntegrityIssue {
  fs::path path;
  IssueKind kind = IssueKind::kCrcMismatch;
  std::uint64_t offset = 0;
  std::string detail;
};

// Streams records from one segment in file order. Stops at the first hard
// corruption and reports it; earlier records are still yielded.
class LogReader {
 public:
  explicit LogReader(const fs::path& path);  // throws NotALogError

  std::optional<StampedRecord> next();
  const std::optional<IntegrityIssue>& issue() const { return issue_; }
  const SegmentHeader& header() const { return header_; }
  std::uint64_t offset() const { return offset_; }
  std::uint64_t records() const { return records_; }

 private:
  fs::path path_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t records_ = 0;
  SegmentHeader header_;
  std::optional<IntegrityIssue> issue_;
  std::map<SensorId, std::uint64_t> next_seq_;
};

struct FileReplay {
  std::vector<StampedRecord> records;
  std::optional<IntegrityIssue> issue;
};

// Reads a whole segment into memory. Throws NotALogError on a bad header.
FileReplay replay(const fs::path& path);

struct SensorReplayStats {
  std::string name;
  std::uint64_t records = 0;
  std::uint64_t bytes = 0;
  std::int64_t first_mono_ns = 0;
  std::int64_t last_mono_ns = 0;
  double rate_hz() const;
};

struct SessionReplay {
  Manifest manifest;
  std::vector<fs::path> segments;
  std::map<SensorId, SensorReplayStats> per_sensor;  // includes kSystemSensorId for events
  std::uint64_t total_records = 0;
  std::vector<IntegrityIssue> issues;
  bool clean() const { return issues.empty(); }
};

struct ReplayOptions {
  std::optional<std::string> sensor;  // count only this sensor by name
  std::function<void(const StampedRecord&)> on_record;
};

// Validates the manifest, every segment header against the manifest's
// session id, contiguous segment numbering, per-record CRCs, and per-sensor
// time order across segments.
SessionReplay replay_session(const fs::path& session_dir, const ReplayOptions& options = {});

}  // namespace fieldpack::rec
