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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mbus/bytes.hpp"
#include "mbus/guid.hpp"
#include "mbus/result.hpp"

namespace mbus::transport {

enum class PacketKind : uint8_t {
  Data = 0,
  AckNack = 1,
  Heartbeat = 2,
  Discovery = 3,
};

inline constexpr uint8_t kFlagEncrypted = 0x01;
inline constexpr uint8_t kFlagBestEffort = 0x02;

/// Fixed 46-byte wire header, bit-exact:
///   offset 0  : magic "MBUS"
///   offset 4  : version (1)
///   offset 5  : kind
///   offset 6  : flags (bit0 encrypted, bit1 best-effort)
///   offset 7  : reserved (0)
///   offset 8  : writer guid (16 bytes)
///   offset 24 : topic id (uint64 LE)
///   offset 32 : seq (uint64 LE, starts at 1)
///   offset 40 : frag index (uint16 LE)
///   offset 42 : frag count (uint16 LE, >= 1)
///   offset 44 : payload length (uint16 LE)
struct PacketHeader {
  PacketKind kind = PacketKind::Data;
  uint8_t flags = 0;
  Guid writer_guid{};
  uint64_t topic_id = 0;
  uint64_t seq = 0;
  uint16_t frag_index = 0;
  uint16_t frag_count = 1;
  uint16_t payload_len = 0;
};

inline constexpr size_t kHeaderSize = 46;
inline constexpr uint8_t kWireVersion = 1;

/// Largest DATA fragment payload; keeps the datagram under a 1500-byte MTU.
inline constexpr size_t kDefaultMaxFragment = 1200;

Result<Bytes> encode_packet(const PacketHeader& header, BytesView payload);

/// A datagram ready to leave the participant. `to` addresses one endpoint
/// (a reader for retransmissions and catch-up, the writer for ACKNACKs);
/// absent means every matched reader.
struct OutboundPacket {
  PacketHeader header;
  Bytes payload;
  std::optional<Guid> to{};
};

/// Header bytes alone (associated data for the security module's AEAD).
Bytes encode_header(const PacketHeader& header);

struct DecodedPacket {
  PacketHeader header;
  BytesView payload;  // view into the input datagram
};

/// Rejects bad magic (foreign_packet: dropped silently at the socket layer),
/// unknown version and length mismatches (decode_error).
Result<DecodedPacket> decode_packet(BytesView datagram);

/// Splits a payload into <= max_fragment chunks; always at least one fragment,
/// even when empty. Views into `payload`.
std::vector<BytesView> fragment_payload(BytesView payload, size_t max_fragment = kDefaultMaxFragment);

// Control payload codecs.
struct AckNack {
  Guid reader_guid{};
  uint64_t base_seq = 0;    // everything below is acknowledged
  uint32_t missing_bitmap = 0;  // bit i set => base_seq + i missing
};
Bytes encode_acknack(const AckNack& a);
Result<AckNack> decode_acknack(BytesView payload);

struct HeartbeatInfo {
  uint64_t first_seq = 0;  // first sample still available
  uint64_t last_seq = 0;   // last sample written (first > last: none pending)
};
Bytes encode_heartbeat(const HeartbeatInfo& h);
Result<HeartbeatInfo> decode_heartbeat(BytesView payload);

}  // namespace mbus::transport
