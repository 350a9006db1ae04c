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

#include "mbus/transport/reader.hpp"

namespace mbus::transport {

DataReader::DataReader(Guid guid, uint64_t topic_id, QosProfile qos, ReaderConfig cfg)
    : guid_(guid), topic_id_(topic_id), qos_(qos), cfg_(cfg) {}

void DataReader::add_writer(const Guid& writer, MonoTime now) {
  (void)now;
  writers_.try_emplace(writer);
}

void DataReader::remove_writer(const Guid& writer) { writers_.erase(writer); }

void DataReader::deliver(const Guid& writer, uint64_t seq, Bytes wire, MonoTime now,
                         ReaderOutput& out) {
  if (wire.size() < 8) return;  // malformed: no source timestamp
  ByteReader r(wire);
  MonoTime source_ts = mono_from_ns(static_cast<int64_t>(r.u64()));
  if (qos_.lifespan && now - source_ts > *qos_.lifespan) {
    ++out.lifespan_expired;
    return;
  }
  ReceivedMessage msg;
  msg.writer = writer;
  msg.seq = seq;
  msg.source_ts = source_ts;
  msg.payload.assign(wire.begin() + 8, wire.end());
  out.messages.push_back(std::move(msg));
}

void DataReader::drain_ready(const Guid& writer, WriterSession& s, MonoTime now,
                             ReaderOutput& out) {
  while (!s.ready.empty() && s.ready.begin()->first == s.next_expected) {
    deliver(writer, s.next_expected, std::move(s.ready.begin()->second), now, out);
    s.ready.erase(s.ready.begin());
    ++s.next_expected;
  }
}

void DataReader::complete_message(const Guid& writer, WriterSession& s, uint64_t seq, Bytes wire,
                                  MonoTime now, ReaderOutput& out) {
  if (qos_.reliability == Reliability::BestEffort) {
    // Deliver whatever arrives; late/backwards sequences are dropped.
    if (seq <= s.highest_delivered) {
      ++duplicates_dropped_;
      return;
    }
    s.highest_delivered = seq;
    deliver(writer, seq, std::move(wire), now, out);
    return;
  }

  if (s.reliable_initialized && seq < s.next_expected) {
    ++duplicates_dropped_;
    return;
  }
  if (!s.ready.emplace(seq, std::move(wire)).second) {
    ++duplicates_dropped_;
    return;
  }
  if (s.reliable_initialized) drain_ready(writer, s, now, out);
}

ReaderOutput DataReader::on_data(const PacketHeader& h, BytesView fragment, MonoTime now) {
  ReaderOutput out;
  auto it = writers_.find(h.writer_guid);
  if (it == writers_.end()) return out;  // unmatched writer
  WriterSession& s = it->second;

  if (h.frag_count == 1) {
    complete_message(h.writer_guid, s, h.seq, Bytes(fragment.begin(), fragment.end()), now, out);
    return out;
  }

  // Already complete or consumed: duplicate fragment.
  if (s.ready.count(h.seq) ||
      (qos_.reliability == Reliability::Reliable && s.reliable_initialized &&
       h.seq < s.next_expected) ||
      (qos_.reliability == Reliability::BestEffort && h.seq <= s.highest_delivered)) {
    ++duplicates_dropped_;
    return out;
  }

  auto [pit, fresh] = s.partial.try_emplace(h.seq);
  Partial& partial = pit->second;
  if (fresh) {
    partial.parts.resize(h.frag_count);
    partial.have.assign(h.frag_count, false);
    partial.first_seen = now;
  } else if (partial.parts.size() != h.frag_count) {
    return out;  // inconsistent fragmenting; keep the first claim
  }
  if (partial.have[h.frag_index]) {
    ++duplicates_dropped_;
    return out;
  }
  partial.have[h.frag_index] = true;
  partial.parts[h.frag_index].assign(fragment.begin(), fragment.end());
  if (++partial.have_count < h.frag_count) return out;

  Bytes wire;
  size_t total = 0;
  for (const auto& part : partial.parts) total += part.size();
  wire.reserve(total);
  for (const auto& part : partial.parts) wire.insert(wire.end(), part.begin(), part.end());
  s.partial.erase(pit);
  complete_message(h.writer_guid, s, h.seq, std::move(wire), now, out);
  return out;
}

OutboundPacket DataReader::acknack_for(const Guid& writer, WriterSession& s,
                                       uint64_t last_known) {
  AckNack ack;
  ack.reader_guid = guid_;
  ack.base_seq = s.next_expected;
  for (uint32_t i = 0; i < 32; ++i) {
    uint64_t seq = ack.base_seq + i;
    if (seq > last_known) break;
    if (!s.ready.count(seq)) ack.missing_bitmap |= 1u << i;
  }
  OutboundPacket p;
  p.header.kind = PacketKind::AckNack;
  p.header.writer_guid = writer;  // routed to the writer being acknowledged
  p.header.topic_id = topic_id_;
  p.header.seq = ++s.acknack_count;
  p.payload = encode_acknack(ack);
  p.header.payload_len = static_cast<uint16_t>(p.payload.size());
  p.to = writer;
  return p;
}

ReaderOutput DataReader::on_heartbeat(const PacketHeader& h, const HeartbeatInfo& hb,
                                      MonoTime now) {
  ReaderOutput out;
  if (qos_.reliability != Reliability::Reliable) return out;
  auto it = writers_.find(h.writer_guid);
  if (it == writers_.end()) return out;
  WriterSession& s = it->second;

  if (!s.reliable_initialized) {
    s.reliable_initialized = true;
    s.next_expected = std::max<uint64_t>(hb.first_seq, 1);
  }
  // Raised first-available is the writer's GAP signal: everything below it
  // that never arrived is unrecoverable.
  while (s.next_expected < hb.first_seq) {
    auto rit = s.ready.find(s.next_expected);
    if (rit != s.ready.end()) {
      deliver(h.writer_guid, s.next_expected, std::move(rit->second), now, out);
      s.ready.erase(rit);
    } else {
      ++out.samples_lost;
    }
    s.partial.erase(s.next_expected);
    ++s.next_expected;
  }
  drain_ready(h.writer_guid, s, now, out);
  out.to_send.push_back(acknack_for(h.writer_guid, s, hb.last_seq));
  return out;
}

size_t DataReader::prune_reassembly(MonoTime now) {
  size_t dropped = 0;
  for (auto& [writer, session] : writers_) {
    for (auto it = session.partial.begin(); it != session.partial.end();) {
      if (now - it->second.first_seen > cfg_.reassembly_timeout) {
        it = session.partial.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
  }
  reassembly_expired_ += dropped;
  return dropped;
}

}  // namespace mbus::transport
