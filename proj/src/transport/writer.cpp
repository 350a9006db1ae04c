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

#include "mbus/transport/writer.hpp"

#include <algorithm>

namespace mbus::transport {

DataWriter::DataWriter(Guid guid, uint64_t topic_id, QosProfile qos, WriterConfig cfg)
    : guid_(guid), topic_id_(topic_id), qos_(qos), cfg_(cfg) {}

PacketHeader DataWriter::data_header(uint64_t seq, uint16_t index, uint16_t count,
                                     uint16_t len) const {
  PacketHeader h;
  h.kind = PacketKind::Data;
  h.flags = qos_.reliability == Reliability::BestEffort ? kFlagBestEffort : 0;
  h.writer_guid = guid_;
  h.topic_id = topic_id_;
  h.seq = seq;
  h.frag_index = index;
  h.frag_count = count;
  h.payload_len = len;
  return h;
}

void DataWriter::fragments_for(uint64_t seq, const Sample& sample, std::optional<Guid> to,
                               std::vector<OutboundPacket>& out) const {
  auto frags = fragment_payload(BytesView(sample.wire), cfg_.max_fragment);
  auto count = static_cast<uint16_t>(frags.size());
  for (uint16_t i = 0; i < count; ++i) {
    OutboundPacket p;
    p.header = data_header(seq, i, count, static_cast<uint16_t>(frags[i].size()));
    p.payload.assign(frags[i].begin(), frags[i].end());
    p.to = to;
    out.push_back(std::move(p));
  }
}

OutboundPacket DataWriter::heartbeat_for(const ReaderTrack& track, const Guid& reader) {
  HeartbeatInfo info;
  info.first_seq = std::max(track.floor, first_cached());
  info.last_seq = last_written();
  OutboundPacket p;
  p.header.kind = PacketKind::Heartbeat;
  p.header.writer_guid = guid_;
  p.header.topic_id = topic_id_;
  p.header.seq = ++heartbeat_count_;
  p.payload = encode_heartbeat(info);
  p.header.payload_len = static_cast<uint16_t>(p.payload.size());
  p.to = reader;
  return p;
}

std::vector<OutboundPacket> DataWriter::add_reader(const Guid& reader,
                                                   const QosProfile& reader_qos, MonoTime now) {
  (void)now;
  std::vector<OutboundPacket> out;
  ReaderTrack track;
  track.reliable = reader_qos.reliability == Reliability::Reliable;
  bool wants_history = reader_qos.durability == Durability::TransientLocal &&
                       qos_.durability == Durability::TransientLocal;
  track.floor = wants_history ? first_cached() : next_seq_;
  track.acked = track.floor - 1;
  readers_[reader] = track;

  if (wants_history) {
    for (const auto& [seq, sample] : cache_)
      if (seq >= track.floor) fragments_for(seq, sample, reader, out);
  }
  if (track.reliable) out.push_back(heartbeat_for(track, reader));
  return out;
}

void DataWriter::remove_reader(const Guid& reader) {
  readers_.erase(reader);
  prune_acked();
}

void DataWriter::cache_insert(uint64_t seq, Sample sample) {
  cache_bytes_ += sample.wire.size();
  cache_.emplace(seq, std::move(sample));
  evict_for_history();
}

void DataWriter::evict_for_history() {
  if (qos_.history != History::KeepLast) return;
  while (cache_.size() > qos_.depth) {
    cache_bytes_ -= cache_.begin()->second.wire.size();
    cache_.erase(cache_.begin());
  }
}

void DataWriter::prune_acked() {
  // Volatile samples are releasable once every matched reliable reader has
  // acknowledged them; transient-local history stays for late joiners.
  if (qos_.durability == Durability::TransientLocal) return;
  if (qos_.reliability == Reliability::BestEffort) return;
  uint64_t min_acked = UINT64_MAX;
  for (const auto& [guid, track] : readers_)
    if (track.reliable) min_acked = std::min(min_acked, track.acked);
  if (min_acked == UINT64_MAX) min_acked = last_written();  // nobody to retransmit to
  while (!cache_.empty() && cache_.begin()->first <= min_acked) {
    cache_bytes_ -= cache_.begin()->second.wire.size();
    cache_.erase(cache_.begin());
  }
}

Result<uint64_t> DataWriter::publish(BytesView message, MonoTime now,
                                     std::vector<OutboundPacket>& out) {
  bool cache_needed = qos_.reliability == Reliability::Reliable ||
                      qos_.durability == Durability::TransientLocal;
  if (cache_needed && qos_.history == History::KeepAll &&
      cache_bytes_ + message.size() + 8 > cfg_.keep_all_high_water)
    return Error{Errc::resource_exhausted, "KEEP_ALL cache above high-water mark"};

  uint64_t seq = next_seq_++;
  Sample sample;
  sample.source_ts = now;
  ByteWriter w(message.size() + 8);
  w.u64(static_cast<uint64_t>(to_ns(now)));
  w.raw(message);
  sample.wire = w.take();

  fragments_for(seq, sample, std::nullopt, out);
  bool fragmented = sample.wire.size() > cfg_.max_fragment;
  if (cache_needed) cache_insert(seq, std::move(sample));
  prune_acked();

  // Piggyback heartbeats after multi-fragment messages: a single lost
  // fragment then recovers within one round trip instead of waiting out the
  // periodic heartbeat.
  if (fragmented && qos_.reliability == Reliability::Reliable) {
    for (const auto& [reader, track] : readers_)
      if (track.reliable) out.push_back(heartbeat_for(track, reader));
    last_heartbeat_ = now;
  }
  return seq;
}

uint64_t DataWriter::advance_seq(MonoTime now) {
  (void)now;
  return next_seq_++;
}

void DataWriter::restore_sample(uint64_t seq, BytesView message, MonoTime source_ts) {
  if (seq >= next_seq_ || cache_.count(seq)) return;
  Sample sample;
  sample.source_ts = source_ts;
  ByteWriter w(message.size() + 8);
  w.u64(static_cast<uint64_t>(to_ns(source_ts)));
  w.raw(message);
  sample.wire = w.take();
  cache_insert(seq, std::move(sample));
}

std::vector<OutboundPacket> DataWriter::on_acknack(const Guid& reader, const AckNack& ack,
                                                   MonoTime now) {
  (void)now;
  std::vector<OutboundPacket> out;
  auto it = readers_.find(reader);
  if (it == readers_.end()) return out;  // stale reader
  ReaderTrack& track = it->second;

  if (ack.base_seq > 0) track.acked = std::max(track.acked, ack.base_seq - 1);

  bool hit_evicted = false;
  for (uint32_t i = 0; i < 32; ++i) {
    if (!(ack.missing_bitmap & (1u << i))) continue;
    uint64_t seq = ack.base_seq + i;
    if (seq >= next_seq_ || seq < track.floor) continue;
    auto sample = cache_.find(seq);
    if (sample == cache_.end()) {
      hit_evicted = true;
      continue;
    }
    fragments_for(seq, sample->second, reader, out);
  }
  if (hit_evicted) out.push_back(heartbeat_for(track, reader));  // GAP: advance the reader
  prune_acked();
  return out;
}

std::vector<OutboundPacket> DataWriter::heartbeat_tick(MonoTime now) {
  std::vector<OutboundPacket> out;
  if (qos_.reliability != Reliability::Reliable) return out;
  if (last_heartbeat_ != MonoTime{} && now - last_heartbeat_ < cfg_.heartbeat_period) return out;
  for (const auto& [reader, track] : readers_) {
    if (!track.reliable) continue;
    if (track.acked >= last_written()) continue;  // all acked
    out.push_back(heartbeat_for(track, reader));
  }
  if (!out.empty()) last_heartbeat_ = now;
  return out;
}

std::optional<MonoTime> DataWriter::next_heartbeat_due(MonoTime now) const {
  if (qos_.reliability != Reliability::Reliable) return std::nullopt;
  bool pending = false;
  for (const auto& [reader, track] : readers_)
    if (track.reliable && track.acked < last_written()) pending = true;
  if (!pending) return std::nullopt;
  if (last_heartbeat_ == MonoTime{}) return now;
  return last_heartbeat_ + cfg_.heartbeat_period;
}

bool DataWriter::fully_acked() const {
  for (const auto& [reader, track] : readers_)
    if (track.reliable && track.acked < last_written()) return false;
  return true;
}

}  // namespace mbus::transport
