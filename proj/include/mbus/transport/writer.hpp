// Copyright 2026 The mbus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mbus/transport/packet.hpp"
#include "mbus/transport/qos.hpp"

namespace mbus::transport {

struct WriterConfig {
  size_t max_fragment = kDefaultMaxFragment;
  size_t keep_all_high_water = 64u << 20;  // bytes
  Duration heartbeat_period = std::chrono::milliseconds(100);
};

/// Writer half of the wire protocol. Single-owner: every call happens on the
/// participant's execution context.
///
/// Reliability scheme: per matched reader the writer keeps a floor (the first
/// sequence that reader is entitled to: the match-time sequence for volatile
/// readers, the first cached sample for transient-local ones) and the highest
/// contiguous acknowledged sequence. Heartbeats are unicast per reader and
/// advertise (first available, last written); eviction past an unacknowledged
/// sample therefore surfaces to the reader as a raised first-available, which
/// is the GAP notification.
class DataWriter {
 public:
  DataWriter(Guid guid, uint64_t topic_id, QosProfile qos, WriterConfig cfg = {});

  const Guid& guid() const { return guid_; }
  uint64_t topic_id() const { return topic_id_; }
  const QosProfile& qos() const { return qos_; }

  /// Registers a matched reader. Returns initial traffic: transient-local
  /// catch-up data plus, for reliable readers, an immediate range heartbeat so
  /// the reader can establish its base without waiting a heartbeat period.
  std::vector<OutboundPacket> add_reader(const Guid& reader, const QosProfile& reader_qos,
                                         MonoTime now);
  void remove_reader(const Guid& reader);
  bool has_reader(const Guid& reader) const { return readers_.count(reader) != 0; }
  size_t reader_count() const { return readers_.size(); }
  std::vector<Guid> reader_guids() const {
    std::vector<Guid> out;
    out.reserve(readers_.size());
    for (const auto& [guid, track] : readers_) out.push_back(guid);
    return out;
  }

  /// Fragments and emits one message. Returns the assigned sequence number.
  /// KEEP_ALL writers refuse (resource_exhausted) above the high-water mark.
  Result<uint64_t> publish(BytesView message, MonoTime now, std::vector<OutboundPacket>& out);

  /// Consumes a sequence number for a message that was delivered purely
  /// in-process: nothing is emitted or cached. The core layer restores the
  /// sample on demand if a remote transient-local reader appears later.
  uint64_t advance_seq(MonoTime now);

  /// Reinstalls a historical sample under its original sequence (lazy
  /// serialization of retained in-process values).
  void restore_sample(uint64_t seq, BytesView message, MonoTime source_ts);

  /// base_seq acknowledges everything below it; set bitmap bits request
  /// retransmission. Unknown readers are stale and ignored.
  std::vector<OutboundPacket> on_acknack(const Guid& reader, const AckNack& ack, MonoTime now);

  /// Emits per-reader heartbeats while unacknowledged data exists, at the
  /// configured cadence. Best-effort writers never emit.
  std::vector<OutboundPacket> heartbeat_tick(MonoTime now);
  std::optional<MonoTime> next_heartbeat_due(MonoTime now) const;

  uint64_t next_seq() const { return next_seq_; }
  uint64_t last_written() const { return next_seq_ - 1; }
  size_t cache_bytes() const { return cache_bytes_; }
  size_t cache_size() const { return cache_.size(); }
  uint64_t first_cached() const { return cache_.empty() ? next_seq_ : cache_.begin()->first; }
  bool fully_acked() const;

 private:
  struct Sample {
    Bytes wire;  // source timestamp prefix + message bytes
    MonoTime source_ts;
  };
  struct ReaderTrack {
    uint64_t floor = 1;  // first sequence this reader is entitled to
    uint64_t acked = 0;  // highest contiguous acknowledged
    bool reliable = true;
  };

  void cache_insert(uint64_t seq, Sample sample);
  void evict_for_history();
  void prune_acked();
  void fragments_for(uint64_t seq, const Sample& sample, std::optional<Guid> to,
                     std::vector<OutboundPacket>& out) const;
  PacketHeader data_header(uint64_t seq, uint16_t index, uint16_t count, uint16_t len) const;
  OutboundPacket heartbeat_for(const ReaderTrack& track, const Guid& reader);

  Guid guid_;
  uint64_t topic_id_;
  QosProfile qos_;
  WriterConfig cfg_;
  uint64_t next_seq_ = 1;
  std::map<uint64_t, Sample> cache_;
  size_t cache_bytes_ = 0;
  std::map<Guid, ReaderTrack> readers_;
  MonoTime last_heartbeat_{};
  uint64_t heartbeat_count_ = 0;
};

}  // namespace mbus::transport
