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
#include "mbus/result.hpp"
#include "mbus/security/crypto.hpp"

namespace mbus::security {

/// Identity certificate: subject + Ed25519 public key + validity window,
/// signed by the single deployment trust anchor (no chains).
struct IdentityCertificate {
  std::string subject;
  Bytes public_key;           // 32 bytes
  uint64_t valid_from_wall_ns = 0;
  uint64_t valid_to_wall_ns = 0;
  Bytes signature;            // 64 bytes, by the trust anchor

  Bytes signing_bytes() const;  // everything the anchor signs
};

Bytes encode_certificate(const IdentityCertificate& cert);
Result<IdentityCertificate> decode_certificate(BytesView bytes);

Status verify_certificate(const IdentityCertificate& cert, BytesView anchor_public,
                          uint64_t now_wall_ns);

enum class RuleDirection : uint8_t { Pub = 0, Sub = 1 };

struct PermissionRule {
  RuleDirection direction = RuleDirection::Pub;
  std::string pattern;  // glob: '*' any run, '?' one character
};

/// Deny-by-default allow list, signed by the trust anchor.
struct PermissionsDocument {
  std::string subject;
  std::vector<PermissionRule> rules;
  Bytes signature;

  Bytes signing_bytes() const;
};

Bytes encode_permissions(const PermissionsDocument& doc);
Result<PermissionsDocument> decode_permissions(BytesView bytes);
Status verify_permissions(const PermissionsDocument& doc, BytesView anchor_public);

bool glob_match(std::string_view pattern, std::string_view text);

/// Allow iff any rule with the matching direction globs the topic.
bool authorize(const PermissionsDocument& doc, RuleDirection direction, std::string_view topic);

}  // namespace mbus::security
