// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/acquisition/recording_queue.hpp"

namespace fieldpack::acq {

EnqueueResult enqueue_for_recording(StampedRecord&& record, RecordingQueue& queue,
                                    Ingestor& ingestor, const OverflowHandler& on_overflow) {
  const SensorId id = record.sensor_id;
  if (queue.try_push(std::move(record)) == PushResult::kAccepted) return EnqueueResult::kAccepted;
  ingestor.note_dropped(id, DropReason::kQueueOverflow);
  if (on_overflow) on_overflow(id);
  return EnqueueResult::kDropped;
}

}  // namespace fieldpack::acq
