// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// pairing.hpp -- stereo pairing by trigger sequence number.
//
// A frame waits for its partner for `window_ns` after arrival. Frames that
// outlive the window become dropout events naming the side that never
// delivered. Frames arriving for a seq that was already resolved are counted
// as late and discarded, so every seq is reported at most once.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "fieldpack/sim/frame.hpp"

namespace fieldpack::acq {

using sim::CameraId;

template <typename FrameT>
struct BasicFramePair {
  FrameT left;
  FrameT right;
  std::uint64_t trigger_seq = 0;
};

struct Dropout {
  CameraId missing = CameraId::kLeft;
  std::uint64_t trigger_seq = 0;
  bool operator==(const Dropout&) const = default;
  auto operator<=>(const Dropout&) const = default;
};

template <typename FrameT>
struct PairingOutput {
  std::vector<BasicFramePair<FrameT>> pairs;
  std::vector<Dropout> dropouts;

  void append(PairingOutput&& other) {
    for (auto& p : other.pairs) pairs.push_back(std::move(p));
    dropouts.insert(dropouts.end(), other.dropouts.begin(), other.dropouts.end());
  }
};

struct PairingStats {
  std::uint64_t pairs = 0;
  std::uint64_t dropouts_left = 0;   // LEFT missing
  std::uint64_t dropouts_right = 0;  // RIGHT missing
  std::uint64_t duplicates = 0;
  std::uint64_t late = 0;
};

// FrameT needs a `trigger_seq` member.
template <typename FrameT>
class FramePairer {
 public:
  using Output = PairingOutput<FrameT>;

  explicit FramePairer(std::int64_t window_ns) : window_ns_(window_ns) {}

  Output push(CameraId side, FrameT frame, std::int64_t now_ns) {
    Output out = expire(now_ns);
    const std::uint64_t seq = frame.trigger_seq;
    if (resolved_.contains(seq)) {
      ++stats_.late;
      return out;
    }
    auto& mine = pending(side);
    auto& theirs = pending(other(side));
    if (mine.contains(seq)) {
      ++stats_.duplicates;
      return out;
    }
    auto it = theirs.find(seq);
    if (it == theirs.end()) {
      mine.emplace(seq, Entry{std::move(frame), now_ns});
      return out;
    }
    BasicFramePair<FrameT> pair;
    pair.trigger_seq = seq;
    if (side == CameraId::kLeft) {
      pair.left = std::move(frame);
      pair.right = std::move(it->second.frame);
    } else {
      pair.left = std::move(it->second.frame);
      pair.right = std::move(frame);
    }
    theirs.erase(it);
    resolve(seq);
    ++stats_.pairs;
    out.pairs.push_back(std::move(pair));
    return out;
  }

  // Emits dropouts for frames that waited longer than the window.
  Output expire(std::int64_t now_ns) {
    Output out;
    collect(CameraId::kLeft, out, [&](const Entry& e) { return now_ns - e.arrival_ns > window_ns_; });
    collect(CameraId::kRight, out, [&](const Entry& e) { return now_ns - e.arrival_ns > window_ns_; });
    return out;
  }

  // End of stream: every unmatched frame becomes a dropout.
  Output flush() {
    Output out;
    collect(CameraId::kLeft, out, [](const Entry&) { return true; });
    collect(CameraId::kRight, out, [](const Entry&) { return true; });
    return out;
  }

  const PairingStats& stats() const { return stats_; }
  std::size_t pending_count() const { return left_.size() + right_.size(); }

 private:
  struct Entry {
    FrameT frame;
    std::int64_t arrival_ns;
  };

  static CameraId other(CameraId s) {
    return s == CameraId::kLeft ? CameraId::kRight : CameraId::kLeft;
  }
  std::map<std::uint64_t, Entry>& pending(CameraId s) {
    return s == CameraId::kLeft ? left_ : right_;
  }

  template <typename Pred>
  void collect(CameraId present_side, Output& out, Pred expired) {
    auto& m = pending(present_side);
    for (auto it = m.begin(); it != m.end();) {
      if (!expired(it->second)) {
        ++it;
        continue;
      }
      const CameraId missing = other(present_side);
      out.dropouts.push_back(Dropout{missing, it->first});
      if (missing == CameraId::kLeft) {
        ++stats_.dropouts_left;
      } else {
        ++stats_.dropouts_right;
      }
      resolve(it->first);
      it = m.erase(it);
    }
  }

  void resolve(std::uint64_t seq) {
    resolved_.insert(seq);
    // Bounded memory: forget resolutions far behind the newest one.
    constexpr std::size_t kKeep = 4096;
    while (resolved_.size() > kKeep) resolved_.erase(resolved_.begin());
  }

  std::int64_t window_ns_;
  std::map<std::uint64_t, Entry> left_;
  std::map<std::uint64_t, Entry> right_;
  std::set<std::uint64_t> resolved_;
  PairingStats stats_;
};

using FramePair = BasicFramePair<sim::Frame>;

}  // namespace fieldpack::acq
