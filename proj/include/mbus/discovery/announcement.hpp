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

#include <string>
#include <vector>

#include "mbus/bytes.hpp"
#include "mbus/guid.hpp"
#include "mbus/time.hpp"
#include "mbus/transport/qos.hpp"

namespace mbus::discovery {

enum class EndpointDirection : uint8_t {
  Publisher = 0,
  Subscription = 1,
  ServiceServer = 2,
  ServiceClient = 3,
};

const char* direction_name(EndpointDirection d);

struct EndpointInfo {
  EndpointDirection direction = EndpointDirection::Publisher;
  std::string topic_name;
  std::string type_name;
  uint64_t type_hash = 0;
  transport::QosProfile qos;
  Guid endpoint_guid{};
  std::string owning_node;

  bool operator==(const EndpointInfo&) const = default;
};

/// Full-snapshot participant announcement: idempotent and loss-tolerant,
/// re-sent every announce period and immediately on endpoint changes with an
/// incremented sequence.
struct ParticipantAnnouncement {
  Guid participant_guid{};
  uint32_t address = 0;  // IPv4, host byte order
  uint16_t port = 0;
  std::vector<std::string> nodes;  // fully-qualified names
  std::vector<EndpointInfo> endpoints;
  Duration lease_duration = std::chrono::seconds(3);
  uint64_t announcement_seq = 0;
  bool secured = false;
  // Secured mode: identity certificate, permissions document, and an Ed25519
  // signature over every preceding announcement byte. Empty otherwise.
  Bytes identity_cert;
  Bytes permissions;
  Bytes signature;
};

/// Announcement body (everything the signature covers).
Bytes encode_announcement_body(const ParticipantAnnouncement& a);
/// Body plus the security block. This is the DISCOVERY payload after the
/// subtype byte.
Bytes encode_announcement(const ParticipantAnnouncement& a);
Result<ParticipantAnnouncement> decode_announcement(BytesView payload);

// DISCOVERY payload subtypes (first payload byte).
inline constexpr uint8_t kDiscoveryAnnouncement = 0;
inline constexpr uint8_t kDiscoveryHandshakeInit = 1;
inline constexpr uint8_t kDiscoveryHandshakeReply = 2;

}  // namespace mbus::discovery
