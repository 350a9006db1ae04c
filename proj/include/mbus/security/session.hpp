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

#include "mbus/guid.hpp"
#include "mbus/security/keystore.hpp"
#include "mbus/transport/packet.hpp"

namespace mbus::security {

/// Per-participant security runtime: announcement signing and verification,
/// the two-message authenticated handshake, and AES-256-GCM datagram
/// protection with the 46-byte header as associated data.
///
/// Handshake: the lower participant guid initiates. Both messages carry the
/// sender's certificate, an ephemeral X25519 public value and a nonce, signed
/// by the sender's identity key over a transcript that pins both guids (and,
/// in the reply, the initiator's ephemeral material). Session keys derive
/// from the X25519 shared secret via HKDF-SHA256: one key and nonce salt per
/// direction of the ordered participant pair.
class SecurityEngine {
 public:
  SecurityEngine(ParticipantIdentity identity, Guid self_participant);

  const ParticipantIdentity& identity() const { return identity_; }

  /// Signs an announcement body, attaching certificate and permissions.
  void sign_announcement(Bytes& body, Bytes& cert, Bytes& perms, Bytes& signature) const;

  struct VerifiedPeer {
    IdentityCertificate certificate;
    PermissionsDocument permissions;
  };
  /// Full verification of a secured announcement: certificate against the
  /// anchor (and validity), signature over the body by the certificate key,
  /// permissions against the anchor, subject consistency.
  Result<VerifiedPeer> verify_announcement(BytesView body, BytesView cert_bytes,
                                           BytesView perm_bytes, BytesView signature,
                                           uint64_t now_wall_ns) const;

  bool should_initiate(const Guid& peer_participant) const {
    return self_ < peer_participant;
  }

  /// Builds the handshake-init payload for a verified peer.
  Result<Bytes> start_handshake(const Guid& peer_participant);
  /// Responder side: verifies init, establishes the session, returns reply.
  Result<Bytes> on_handshake_init(BytesView payload, uint64_t now_wall_ns);
  /// Initiator side: verifies reply and establishes the session.
  Status on_handshake_reply(BytesView payload, uint64_t now_wall_ns);

  bool session_ready(const Guid& peer_participant) const {
    return sessions_.count(peer_participant) != 0;
  }
  /// 8-byte key check value; equal on both sides of a session.
  Result<Bytes> key_check_value(const Guid& peer_participant) const;

  /// Seals header+payload into a complete datagram: the header (flags bit0
  /// set, payload_len fixed up) becomes the associated data; the sealed
  /// payload is seal counter (8) || ciphertext || tag (16).
  Result<Bytes> seal_datagram(const Guid& peer_participant, transport::PacketHeader header,
                              BytesView payload);
  /// Opens a sealed payload. Replay of an already-seen seal counter is
  /// rejected (sliding window) before authentication.
  Result<Bytes> open_datagram(const Guid& peer_participant,
                              const transport::PacketHeader& header, BytesView sealed_payload);

  uint64_t auth_failures() const { return auth_failures_; }
  uint64_t replay_drops() const { return replay_drops_; }

  /// Test hook: fast-forwards the outbound seal counter to probe nonce
  /// exhaustion handling.
  void set_seal_counter_for_test(const Guid& peer_participant, uint64_t value);

 private:
  struct Session {
    Bytes key_tx, key_rx;    // 32 bytes each
    uint32_t salt_tx = 0, salt_rx = 0;
    uint64_t seal_counter = 0;       // last used; nonce = counter || salt
    uint64_t replay_highest = 0;     // sliding window over received counters
    std::vector<bool> replay_window = std::vector<bool>(kReplayWindow, false);
    Bytes kcv;
  };
  struct PendingHandshake {
    Bytes eph_private;
    Bytes eph_public;
    Bytes nonce;
  };

  static constexpr size_t kReplayWindow = 1024;

  Status establish(const Guid& peer, bool initiator, BytesView shared, BytesView nonce_i,
                   BytesView nonce_r, const Guid& initiator_guid, const Guid& responder_guid);
  bool replay_check_and_mark(Session& s, uint64_t counter);

  ParticipantIdentity identity_;
  Guid self_;
  std::map<Guid, Session> sessions_;
  std::map<Guid, PendingHandshake> pending_;
  uint64_t auth_failures_ = 0;
  uint64_t replay_drops_ = 0;
};

}  // namespace mbus::security
