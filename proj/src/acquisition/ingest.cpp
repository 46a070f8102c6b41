// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/acquisition/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace fieldpack::acq {

void validate_descriptors(const std::vector<SensorDescriptor>& descriptors) {
  std::map<SensorId, std::string> ids;
  std::set<std::string> names;
  for (const auto& d : descriptors) {
    if (d.id == kSystemSensorId) {
      throw DescriptorError("sensor '" + d.name + "' uses reserved id 255");
    }
    if (auto [it, fresh] = ids.emplace(d.id, d.name); !fresh) {
      throw DescriptorError("duplicate sensor id " + std::to_string(d.id) + " ('" + it->second + "' and '" +
                            d.name + "')");
    }
    if (d.name.empty()) {
      throw DescriptorError("sensor id " + std::to_string(d.id) + " has an empty name");
    }
    const bool token = std::all_of(d.name.begin(), d.name.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '_' || c == '-';
    });
    if (!token) {
      throw DescriptorError("sensor name '" + d.name + "' may only use letters, digits, '_' and '-'");
    }
    if (!names.insert(d.name).second) {
      throw DescriptorError("duplicate sensor name '" + d.name + "'");
    }
    if (!(d.nominal_rate_hz > 0.0)) {
      throw DescriptorError("sensor '" + d.name + "' needs a positive nominal rate");
    }
    const double period_ms = 1000.0 / d.nominal_rate_hz;
    if (!(d.silence_timeout_ms > period_ms)) {
      throw DescriptorError("sensor '" + d.name + "' silence timeout " +
                            std::to_string(d.silence_timeout_ms) +
                            " ms must exceed its period of " + std::to_string(period_ms) + " ms");
    }
  }
}

void RateMeter::add(std::int64_t t_ns, std::uint64_t bytes) {
  if (!first_ns_) first_ns_ = t_ns;
  events_.emplace_back(t_ns, bytes);
  bytes_in_window_ += bytes;
  trim(t_ns);
}

void RateMeter::trim(std::int64_t now_ns) {
  while (!events_.empty() && events_.front().first <= now_ns - window_ns_) {
    bytes_in_window_ -= events_.front().second;
    events_.pop_front();
  }
}

double RateMeter::span_s(std::int64_t now_ns) const {
  if (!first_ns_) return 0.0;
  const std::int64_t covered = std::min(window_ns_, now_ns - *first_ns_);
  return static_cast<double>(covered) / 1e9;
}

double RateMeter::rate_hz(std::int64_t now_ns) {
  trim(now_ns);
  const double s = span_s(now_ns);
  return s > 0.0 ? static_cast<double>(events_.size()) / s : 0.0;
}

double RateMeter::bandwidth_bps(std::int64_t now_ns) {
  trim(now_ns);
  const double s = span_s(now_ns);
  return s > 0.0 ? static_cast<double>(bytes_in_window_) * 8.0 / s : 0.0;
}

void RateMeter::clear() {
  events_.clear();
  bytes_in_window_ = 0;
  first_ns_.reset();
}

Ingestor::Ingestor(std::vector<SensorDescriptor> descriptors, const Clock& clock,
                   std::int64_t rate_window_ns)
    : descriptors_(std::move(descriptors)), clock_(clock) {
  validate_descriptors(descriptors_);
  index_of_.fill(-1);
  for (std::size_t i = 0; i < descriptors_.size(); ++i) {
    index_of_[descriptors_[i].id] = static_cast<int>(i);
    slots_.push_back(std::make_unique<Slot>(rate_window_ns));
  }
}

Ingestor::Slot* Ingestor::slot(SensorId id) const {
  const int i = index_of_[id];
  return i < 0 ? nullptr : slots_[static_cast<std::size_t>(i)].get();
}

const SensorDescriptor* Ingestor::find(SensorId id) const {
  const int i = index_of_[id];
  return i < 0 ? nullptr : &descriptors_[static_cast<std::size_t>(i)];
}

const SensorDescriptor* Ingestor::find(std::string_view name) const {
  for (const auto& d : descriptors_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::optional<StampedRecord> Ingestor::ingest(RawDatum&& datum) {
  Slot* s = slot(datum.sensor_id);
  if (s == nullptr) {
    rejected_.fetch_add(1);
    return std::nullopt;
  }
  StampedRecord rec;
  rec.sensor_id = datum.sensor_id;
  rec.record_type = datum.record_type;
  rec.payload = std::move(datum.payload);
  {
    std::lock_guard lock(s->mu);
    // Stamp under the slot lock so seq order and mono order agree.
    rec.mono_ns = std::max(clock_.mono_ns(), s->last_mono);
    rec.wall_ns = clock_.wall_ns();
    rec.seq = s->next_seq++;
    s->last_mono = rec.mono_ns;
    s->meter.add(rec.mono_ns, rec.payload.size());
    s->ingested.fetch_add(1);
    s->bytes_in.fetch_add(rec.payload.size());
  }
  return rec;
}

void Ingestor::note_recorded(SensorId id) {
  if (Slot* s = slot(id)) s->recorded.fetch_add(1);
}

void Ingestor::note_dropped(SensorId id, DropReason reason) {
  Slot* s = slot(id);
  if (s == nullptr) return;
  switch (reason) {
    case DropReason::kQueueOverflow: s->dropped_overflow.fetch_add(1); break;
    case DropReason::kDiskFull: s->dropped_disk.fetch_add(1); break;
    case DropReason::kNotRecording: s->dropped_not_recording.fetch_add(1); break;
  }
}

SensorStats Ingestor::collect(std::size_t i) const {
  Slot& s = *slots_[i];
  SensorStats out;
  out.id = descriptors_[i].id;
  out.name = descriptors_[i].name;
  out.ingested_count = s.ingested.load();
  out.recorded_count = s.recorded.load();
  out.bytes_in = s.bytes_in.load();
  out.dropped_queue_overflow = s.dropped_overflow.load();
  out.dropped_disk_full = s.dropped_disk.load();
  out.dropped_not_recording = s.dropped_not_recording.load();
  out.dropped_count = out.dropped_queue_overflow + out.dropped_disk_full + out.dropped_not_recording;
  const std::int64_t now = clock_.mono_ns();
  std::lock_guard lock(s.mu);
  out.measured_rate_hz = s.meter.rate_hz(now);
  out.measured_bandwidth_bps = s.meter.bandwidth_bps(now);
  return out;
}

IngestStats Ingestor::stats() const {
  IngestStats out;
  out.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) out.push_back(collect(i));
  return out;
}

std::optional<SensorStats> Ingestor::stats_for(SensorId id) const {
  const int i = index_of_[id];
  if (i < 0) return std::nullopt;
  return collect(static_cast<std::size_t>(i));
}

void Ingestor::reset_stats() {
  for (auto& s : slots_) {
    std::lock_guard lock(s->mu);
    s->ingested = 0;
    s->recorded = 0;
    s->bytes_in = 0;
    s->dropped_overflow = 0;
    s->dropped_disk = 0;
    s->dropped_not_recording = 0;
    s->meter.clear();
  }
  rejected_ = 0;
}

}  // namespace fieldpack::acq
