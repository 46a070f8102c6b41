// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/recorder/replay.hpp"

#include <algorithm>
#include <regex>

namespace fieldpack::rec {

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kCrcMismatch: return "CRC_MISMATCH";
    case IssueKind::kTruncated: return "TRUNCATED";
    case IssueKind::kBadRecord: return "BAD_RECORD";
    case IssueKind::kNotALog: return "NOT_A_LOG";
    case IssueKind::kSessionMismatch: return "SESSION_MISMATCH";
    case IssueKind::kManifest: return "MANIFEST";
    case IssueKind::kMissingSegment: return "MISSING_SEGMENT";
    case IssueKind::kOrdering: return "ORDERING";
  }
  return "?";
}

LogReader::LogReader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw NotALogError("cannot open " + path.string());
  std::error_code ec;
  file_size_ = fs::file_size(path, ec);
  if (ec) throw NotALogError("cannot stat " + path.string());
  Bytes head(kSegmentHeaderBytes);
  in_.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  if (static_cast<std::size_t>(in_.gcount()) != head.size()) {
    throw NotALogError(path.string() + ": file too short for a segment header");
  }
  try {
    header_ = decode_segment_header(head);
  } catch (const NotALogError& e) {
    throw NotALogError(path.string() + ": " + e.what());
  }
  offset_ = kSegmentHeaderBytes;
}

std::optional<StampedRecord> LogReader::next() {
  if (issue_ || offset_ == file_size_) return std::nullopt;
  const std::uint64_t remaining = file_size_ - offset_;
  auto truncated = [&](const std::string& what) {
    issue_ = IntegrityIssue{path_, IssueKind::kTruncated, offset_, what};
    return std::nullopt;
  };
  if (remaining < kRecordHeaderBytes + kRecordCrcBytes) {
    return truncated("trailing " + std::to_string(remaining) + " bytes are not a whole record");
  }
  Bytes frame(kRecordHeaderBytes);
  in_.read(reinterpret_cast<char*>(frame.data()), kRecordHeaderBytes);
  const std::uint32_t len = get_u32le(frame, 2);
  if (static_cast<std::uint64_t>(len) + kRecordHeaderBytes + kRecordCrcBytes > remaining) {
    return truncated("record declares " + std::to_string(len) + " payload bytes, only " +
                     std::to_string(remaining) + " bytes remain");
  }
  frame.resize(kRecordHeaderBytes + len + kRecordCrcBytes);
  in_.read(reinterpret_cast<char*>(frame.data() + kRecordHeaderBytes),
           static_cast<std::streamsize>(len + kRecordCrcBytes));
  if (!in_) {
    return truncated("short read");
  }
  const ByteView body(frame.data(), kRecordHeaderBytes + len);
  const std::uint32_t stored = get_u32le(frame, kRecordHeaderBytes + len);
  if (crc32_ieee(body) != stored) {
    issue_ = IntegrityIssue{path_, IssueKind::kCrcMismatch, offset_, "record CRC mismatch"};
    return std::nullopt;
  }
  const auto type = record_type_from_u8(frame[1]);
  if (!type) {
    issue_ = IntegrityIssue{path_, IssueKind::kBadRecord, offset_,
                            "unknown record type " + std::to_string(frame[1])};
    return std::nullopt;
  }
  StampedRecord rec;
  rec.sensor_id = frame[0];
  rec.record_type = *type;
  rec.mono_ns = static_cast<std::int64_t>(get_u64le(frame, 6));
  rec.wall_ns = static_cast<std::int64_t>(get_u64le(frame, 14));
  rec.payload.assign(frame.begin() + kRecordHeaderBytes, frame.begin() + kRecordHeaderBytes + len);
  rec.seq = next_seq_[rec.sensor_id]++;
  offset_ += frame.size();
  ++records_;
  return rec;
}

FileReplay replay(const fs::path& path) {
  LogReader reader(path);
  FileReplay out;
  while (auto r = reader.next()) out.records.push_back(std::move(*r));
  out.issue = reader.issue();
  return out;
}

double SensorReplayStats::rate_hz() const {
  if (records < 2 || last_mono_ns <= first_mono_ns) return 0.0;
  return static_cast<double>(records - 1) * 1e9 / static_cast<double>(last_mono_ns - first_mono_ns);
}

SessionReplay replay_session(const fs::path& session_dir, const ReplayOptions& options) {
  SessionReplay out;
  try {
    out.manifest = read_manifest(session_dir);
  } catch (const ManifestError& e) {
    out.issues.push_back({session_dir / kManifestName, IssueKind::kManifest, 0, e.what()});
  }
  const bool have_manifest = out.issues.empty();

  std::optional<SensorId> only;
  if (options.sensor) {
    for (const auto& s : out.manifest.sensors) {
      if (s.name == *options.sensor) only = s.id;
    }
    if (!only) {
      out.issues.push_back({session_dir, IssueKind::kManifest, 0,
                            "sensor '" + *options.sensor + "' is not in the manifest"});
      return out;
    }
  }

  static const std::regex kSegmentRe(R"(^(\d{6})\.fpk$)");
  std::vector<std::pair<std::uint32_t, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(session_dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, kSegmentRe)) {
      found.emplace_back(static_cast<std::uint32_t>(std::stoul(m[1].str())), entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != i + 1) {
      out.issues.push_back({session_dir / segment_name(static_cast<std::uint32_t>(i + 1)),
                            IssueKind::kMissingSegment, 0, "segment numbering has a gap"});
      break;
    }
  }
  if (found.empty()) {
    out.issues.push_back({session_dir, IssueKind::kMissingSegment, 0, "no segments"});
  }

  std::map<SensorId, std::string> names;
  for (const auto& s : out.manifest.sensors) names[s.id] = s.name;
  names[kSystemSensorId] = "EVENT";
  std::map<SensorId, std::int64_t> last_mono;
  std::map<SensorId, std::uint64_t> seq;

  for (const auto& [num, path] : found) {
    out.segments.push_back(path);
    std::optional<LogReader> reader;
    try {
      reader.emplace(path);
    } catch (const NotALogError& e) {
      out.issues.push_back({path, IssueKind::kNotALog, 0, e.what()});
      continue;
    }
    if (have_manifest && !(reader->header().session == out.manifest.session)) {
      out.issues.push_back({path, IssueKind::kSessionMismatch, 10,
                            "segment session id differs from the manifest"});
    }
    while (auto r = reader->next()) {
      r->seq = seq[r->sensor_id]++;
      auto lm = last_mono.find(r->sensor_id);
      if (lm != last_mono.end() && r->mono_ns < lm->second) {
        out.issues.push_back({path, IssueKind::kOrdering, reader->offset(),
                              "mono_ns went backwards for sensor " + std::to_string(r->sensor_id)});
      }
      last_mono[r->sensor_id] = r->mono_ns;
      if (have_manifest && r->sensor_id != kSystemSensorId && !names.contains(r->sensor_id)) {
        out.issues.push_back({path, IssueKind::kBadRecord, reader->offset(),
                              "record for unknown sensor id " + std::to_string(r->sensor_id)});
      }
      if (only && r->sensor_id != *only) continue;
      auto& st = out.per_sensor[r->sensor_id];
      if (st.records == 0) {
        st.name = names.contains(r->sensor_id) ? names[r->sensor_id] : "ID" + std::to_string(r->sensor_id);
        st.first_mono_ns = r->mono_ns;
      }
      ++st.records;
      st.bytes += r->payload.size();
      st.last_mono_ns = r->mono_ns;
      ++out.total_records;
      if (options.on_record) options.on_record(*r);
    }
    if (reader->issue()) out.issues.push_back(*reader->issue());
  }
  return out;
}

}  // namespace fieldpack::rec
