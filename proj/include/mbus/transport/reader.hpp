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
#include <vector>

#include "mbus/transport/packet.hpp"
#include "mbus/transport/qos.hpp"

namespace mbus::transport {

struct ReaderConfig {
  Duration reassembly_timeout = std::chrono::seconds(2);
};

struct ReceivedMessage {
  Guid writer{};
  uint64_t seq = 0;
  MonoTime source_ts{};
  Bytes payload;
};

struct ReaderOutput {
  std::vector<ReceivedMessage> messages;        // delivery order
  std::vector<OutboundPacket> to_send;          // ACKNACKs addressed to the writer
  uint64_t samples_lost = 0;                    // unrecoverable holes this call
  uint64_t lifespan_expired = 0;
};

/// Reader half of the wire protocol. Reliable sessions hold everything until
/// the first heartbeat establishes the entitled base sequence, then deliver
/// in order without duplicates, NACKing holes each heartbeat. Best-effort
/// sessions deliver whatever arrives and skip backwards sequences.
class DataReader {
 public:
  DataReader(Guid guid, uint64_t topic_id, QosProfile qos, ReaderConfig cfg = {});

  const Guid& guid() const { return guid_; }
  uint64_t topic_id() const { return topic_id_; }
  const QosProfile& qos() const { return qos_; }

  void add_writer(const Guid& writer, MonoTime now);
  void remove_writer(const Guid& writer);
  bool knows_writer(const Guid& writer) const { return writers_.count(writer) != 0; }

  ReaderOutput on_data(const PacketHeader& header, BytesView fragment, MonoTime now);
  ReaderOutput on_heartbeat(const PacketHeader& header, const HeartbeatInfo& hb, MonoTime now);

  /// Drops reassembly buffers older than the configured timeout.
  size_t prune_reassembly(MonoTime now);

  uint64_t duplicates_dropped() const { return duplicates_dropped_; }
  uint64_t reassembly_expired() const { return reassembly_expired_; }

 private:
  struct Partial {
    std::vector<Bytes> parts;
    std::vector<bool> have;
    size_t have_count = 0;
    MonoTime first_seen{};
  };
  struct WriterSession {
    bool reliable_initialized = false;
    uint64_t next_expected = 1;     // reliable, valid once initialized
    uint64_t highest_delivered = 0; // best-effort no-backwards rule
    std::map<uint64_t, Bytes> ready;     // complete, awaiting in-order drain
    std::map<uint64_t, Partial> partial; // fragment reassembly
    uint64_t acknack_count = 0;
  };

  void complete_message(const Guid& writer, WriterSession& s, uint64_t seq, Bytes wire,
                        MonoTime now, ReaderOutput& out);
  void drain_ready(const Guid& writer, WriterSession& s, MonoTime now, ReaderOutput& out);
  void deliver(const Guid& writer, uint64_t seq, Bytes wire, MonoTime now, ReaderOutput& out);
  OutboundPacket acknack_for(const Guid& writer, WriterSession& s, uint64_t last_known);

  Guid guid_;
  uint64_t topic_id_;
  QosProfile qos_;
  ReaderConfig cfg_;
  std::map<Guid, WriterSession> writers_;
  uint64_t duplicates_dropped_ = 0;
  uint64_t reassembly_expired_ = 0;
};

}  // namespace mbus::transport
