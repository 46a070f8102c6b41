// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// recording_queue.hpp -- the bounded hand-off between ingest and the writer.

#pragma once

#include <functional>

#include "fieldpack/acquisition/ingest.hpp"
#include "fieldpack/common/bounded_queue.hpp"

namespace fieldpack::acq {

// Multi-producer, single-consumer, drop-newest. Capacity is fixed when the
// recording session starts.
using RecordingQueue = BoundedQueue<StampedRecord>;

enum class EnqueueResult { kAccepted, kDropped };

using OverflowHandler = std::function<void(SensorId)>;

// Accepted records are the writer's to count as recorded. A full (or closed)
// queue drops the record whole, counts it against the sensor, and reports
// the overflow.
EnqueueResult enqueue_for_recording(StampedRecord&& record, RecordingQueue& queue,
                                    Ingestor& ingestor, const OverflowHandler& on_overflow);

}  // namespace fieldpack::acq
