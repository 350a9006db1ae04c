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

#include "mbus/discovery/announcement.hpp"

namespace mbus::discovery {

const char* direction_name(EndpointDirection d) {
  switch (d) {
    case EndpointDirection::Publisher: return "publisher";
    case EndpointDirection::Subscription: return "subscription";
    case EndpointDirection::ServiceServer: return "service_server";
    case EndpointDirection::ServiceClient: return "service_client";
  }
  return "?";
}

namespace {

void encode_endpoint(ByteWriter& w, const EndpointInfo& e) {
  w.u8(static_cast<uint8_t>(e.direction));
  w.str(e.topic_name);
  w.str(e.type_name);
  w.u64(e.type_hash);
  transport::encode_qos(w, e.qos);
  w.raw(e.endpoint_guid.bytes.data(), 16);
  w.str(e.owning_node);
}

Result<EndpointInfo> decode_endpoint(ByteReader& r) {
  EndpointInfo e;
  uint8_t dir = r.u8();
  if (dir > static_cast<uint8_t>(EndpointDirection::ServiceClient))
    return Error{Errc::decode_error, "bad endpoint direction"};
  e.direction = static_cast<EndpointDirection>(dir);
  e.topic_name = r.str();
  e.type_name = r.str();
  e.type_hash = r.u64();
  auto qos = transport::decode_qos(r);
  if (!qos.ok()) return qos.error();
  e.qos = qos.value();
  auto guid = r.raw(16);
  if (!r.ok()) return Error{Errc::decode_error, "truncated endpoint"};
  std::memcpy(e.endpoint_guid.bytes.data(), guid.data(), 16);
  e.owning_node = r.str();
  if (!r.ok() || e.topic_name.empty())
    return Error{Errc::decode_error, "truncated or empty-topic endpoint"};
  return e;
}

}  // namespace

Bytes encode_announcement_body(const ParticipantAnnouncement& a) {
  ByteWriter w(256);
  w.raw(a.participant_guid.bytes.data(), 16);
  w.u32(a.address);
  w.u16(a.port);
  w.u64(a.announcement_seq);
  w.i64(a.lease_duration.count());
  w.u8(a.secured ? 1 : 0);
  w.u32(static_cast<uint32_t>(a.nodes.size()));
  for (const auto& n : a.nodes) w.str(n);
  w.u32(static_cast<uint32_t>(a.endpoints.size()));
  for (const auto& e : a.endpoints) encode_endpoint(w, e);
  return w.take();
}

Bytes encode_announcement(const ParticipantAnnouncement& a) {
  Bytes body = encode_announcement_body(a);
  if (!a.secured) return body;
  ByteWriter w(body.size() + a.identity_cert.size() + a.permissions.size() + 80);
  w.raw(body);
  w.blob(a.identity_cert);
  w.blob(a.permissions);
  w.blob(a.signature);
  return w.take();
}

Result<ParticipantAnnouncement> decode_announcement(BytesView payload) {
  ByteReader r(payload);
  ParticipantAnnouncement a;
  auto guid = r.raw(16);
  if (!r.ok()) return Error{Errc::decode_error, "truncated announcement"};
  std::memcpy(a.participant_guid.bytes.data(), guid.data(), 16);
  a.address = r.u32();
  a.port = r.u16();
  a.announcement_seq = r.u64();
  int64_t lease_ns = r.i64();
  if (lease_ns <= 0) return Error{Errc::decode_error, "non-positive lease"};
  a.lease_duration = Duration(lease_ns);
  a.secured = r.u8() != 0;
  uint32_t n_nodes = r.u32();
  if (!r.ok() || n_nodes > 100'000) return Error{Errc::decode_error, "bad node count"};
  a.nodes.reserve(n_nodes);
  for (uint32_t i = 0; i < n_nodes; ++i) a.nodes.push_back(r.str());
  uint32_t n_eps = r.u32();
  if (!r.ok() || n_eps > 100'000) return Error{Errc::decode_error, "bad endpoint count"};
  a.endpoints.reserve(n_eps);
  for (uint32_t i = 0; i < n_eps; ++i) {
    auto e = decode_endpoint(r);
    if (!e.ok()) return e.error();
    a.endpoints.push_back(std::move(e.value()));
  }
  if (a.secured) {
    a.identity_cert = r.blob();
    a.permissions = r.blob();
    a.signature = r.blob();
  }
  if (!r.ok() || !r.exhausted()) return Error{Errc::decode_error, "malformed announcement"};
  return a;
}

}  // namespace mbus::discovery
