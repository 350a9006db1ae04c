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

#include "mbus/transport/packet.hpp"

namespace mbus::transport {

namespace {
constexpr uint8_t kMagic[4] = {'M', 'B', 'U', 'S'};

void write_header(ByteWriter& w, const PacketHeader& h) {
  w.raw(kMagic, 4);
  w.u8(kWireVersion);
  w.u8(static_cast<uint8_t>(h.kind));
  w.u8(h.flags);
  w.u8(0);  // reserved
  w.raw(h.writer_guid.bytes.data(), 16);
  w.u64(h.topic_id);
  w.u64(h.seq);
  w.u16(h.frag_index);
  w.u16(h.frag_count);
  w.u16(h.payload_len);
}
}  // namespace

Bytes encode_header(const PacketHeader& header) {
  ByteWriter w(kHeaderSize);
  write_header(w, header);
  return w.take();
}

Result<Bytes> encode_packet(const PacketHeader& header, BytesView payload) {
  if (payload.size() > 0xFFFF)
    return Error{Errc::validation_error, "payload exceeds 65535 bytes"};
  if (header.frag_count == 0 || header.frag_index >= header.frag_count)
    return Error{Errc::validation_error, "fragment index out of range"};
  if (header.payload_len != payload.size())
    return Error{Errc::validation_error, "payload_len does not match payload"};
  ByteWriter w(kHeaderSize + payload.size());
  write_header(w, header);
  w.raw(payload);
  return w.take();
}

Result<DecodedPacket> decode_packet(BytesView datagram) {
  if (datagram.size() < kHeaderSize)
    return Error{Errc::decode_error, "datagram shorter than header"};
  if (std::memcmp(datagram.data(), kMagic, 4) != 0)
    return Error{Errc::foreign_packet, "bad magic"};

  ByteReader r(datagram);
  (void)r.raw(4);
  uint8_t version = r.u8();
  if (version != kWireVersion)
    return Error{Errc::decode_error, "unsupported version " + std::to_string(version)};

  DecodedPacket p;
  uint8_t kind = r.u8();
  if (kind > static_cast<uint8_t>(PacketKind::Discovery))
    return Error{Errc::decode_error, "unknown packet kind"};
  p.header.kind = static_cast<PacketKind>(kind);
  p.header.flags = r.u8();
  (void)r.u8();  // reserved
  auto guid = r.raw(16);
  std::memcpy(p.header.writer_guid.bytes.data(), guid.data(), 16);
  p.header.topic_id = r.u64();
  p.header.seq = r.u64();
  p.header.frag_index = r.u16();
  p.header.frag_count = r.u16();
  p.header.payload_len = r.u16();

  if (p.header.frag_count == 0 || p.header.frag_index >= p.header.frag_count)
    return Error{Errc::decode_error, "fragment index out of range"};
  if (datagram.size() - kHeaderSize != p.header.payload_len)
    return Error{Errc::decode_error, "payload length mismatch"};
  p.payload = datagram.subspan(kHeaderSize);
  return p;
}

std::vector<BytesView> fragment_payload(BytesView payload, size_t max_fragment) {
  std::vector<BytesView> frags;
  if (payload.empty()) {
    frags.push_back(payload);  // minimum-one rule
    return frags;
  }
  size_t n = (payload.size() + max_fragment - 1) / max_fragment;
  frags.reserve(n);
  for (size_t off = 0; off < payload.size(); off += max_fragment)
    frags.push_back(payload.subspan(off, std::min(max_fragment, payload.size() - off)));
  return frags;
}

Bytes encode_acknack(const AckNack& a) {
  ByteWriter w(28);
  w.raw(a.reader_guid.bytes.data(), 16);
  w.u64(a.base_seq);
  w.u32(a.missing_bitmap);
  return w.take();
}

Result<AckNack> decode_acknack(BytesView payload) {
  if (payload.size() != 28) return Error{Errc::decode_error, "bad ACKNACK size"};
  ByteReader r(payload);
  AckNack a;
  std::memcpy(a.reader_guid.bytes.data(), r.raw(16).data(), 16);
  a.base_seq = r.u64();
  a.missing_bitmap = r.u32();
  return a;
}

Bytes encode_heartbeat(const HeartbeatInfo& h) {
  ByteWriter w(16);
  w.u64(h.first_seq);
  w.u64(h.last_seq);
  return w.take();
}

Result<HeartbeatInfo> decode_heartbeat(BytesView payload) {
  if (payload.size() != 16) return Error{Errc::decode_error, "bad HEARTBEAT size"};
  ByteReader r(payload);
  HeartbeatInfo h;
  h.first_seq = r.u64();
  h.last_seq = r.u64();
  return h;
}

}  // namespace mbus::transport
