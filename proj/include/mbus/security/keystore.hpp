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

#include "mbus/security/identity.hpp"
#include "mbus/time.hpp"

namespace mbus::security {

/// Binary container for key material: magic "MKEY", uint16 version=1,
/// uint8 object type, uint32 payload length, payload.
enum class KeyObjectType : uint8_t {
  AnchorPublic = 1,
  AnchorPrivate = 2,
  IdentityCert = 3,
  IdentityPrivate = 4,
  Permissions = 5,
};

Status write_key_object(const std::string& path, KeyObjectType type, BytesView payload);
Result<Bytes> read_key_object(const std::string& path, KeyObjectType expected);

/// Everything one participant needs to join a secured domain.
struct ParticipantIdentity {
  IdentityCertificate certificate;
  Bytes private_key;  // Ed25519, matches certificate.public_key
  PermissionsDocument permissions;
  Bytes anchor_public;
};

/// Documented keystore directory layout:
///   <root>/anchor.pub.mkey          trust anchor public key
///   <root>/anchor.key.mkey          trust anchor private key
///   <root>/<subject>/identity.cert.mkey
///   <root>/<subject>/identity.key.mkey
///   <root>/<subject>/permissions.mkey
class Keystore {
 public:
  explicit Keystore(std::string root) : root_(std::move(root)) {}

  const std::string& root() const { return root_; }

  Status create_anchor(bool overwrite = false);
  Result<Bytes> anchor_public() const;
  Result<Bytes> anchor_private() const;

  /// Generates a keypair, signs a certificate valid [now, now+validity], and
  /// stores both. Refuses an existing subject unless overwrite is set.
  Status create_identity(const std::string& subject, Duration validity, bool overwrite = false);

  /// Signs and stores a permissions document for the subject.
  Status create_permissions(const std::string& subject, std::vector<PermissionRule> rules,
                            bool overwrite = false);

  Result<ParticipantIdentity> load(const std::string& subject) const;

  /// Verifies the subject's stored certificate and permissions against the
  /// anchor (validity checked at now_wall_ns).
  Status verify(const std::string& subject, uint64_t now_wall_ns) const;

  std::vector<std::string> subjects() const;

 private:
  std::string subject_dir(const std::string& subject) const;
  std::string root_;
};

}  // namespace mbus::security
