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

#include "mbus/security/session.hpp"

namespace mbus::security {

namespace {

constexpr size_t kNonceLen = 16;  // handshake nonces
constexpr const char* kHs1Context = "MBUS-HS1";
constexpr const char* kHs2Context = "MBUS-HS2";

struct HandshakeMessage {
  Guid sender;
  Guid target;
  Bytes cert;
  Bytes eph_public;
  Bytes nonce;
  Bytes signature;
};

Bytes encode_handshake(const HandshakeMessage& m) {
  ByteWriter w(256);
  w.raw(m.sender.bytes.data(), 16);
  w.raw(m.target.bytes.data(), 16);
  w.blob(m.cert);
  w.blob(m.eph_public);
  w.blob(m.nonce);
  w.blob(m.signature);
  return w.take();
}

Result<HandshakeMessage> decode_handshake(BytesView payload) {
  ByteReader r(payload);
  HandshakeMessage m;
  auto s = r.raw(16);
  auto t = r.raw(16);
  if (!r.ok()) return Error{Errc::decode_error, "truncated handshake"};
  std::memcpy(m.sender.bytes.data(), s.data(), 16);
  std::memcpy(m.target.bytes.data(), t.data(), 16);
  m.cert = r.blob();
  m.eph_public = r.blob();
  m.nonce = r.blob();
  m.signature = r.blob();
  if (!r.ok() || !r.exhausted()) return Error{Errc::decode_error, "malformed handshake"};
  if (m.eph_public.size() != kKeyBytes || m.nonce.size() != kNonceLen ||
      m.signature.size() != kSigBytes)
    return Error{Errc::decode_error, "bad handshake field sizes"};
  return m;
}

Bytes hs1_transcript(const Guid& initiator, const Guid& responder, BytesView eph,
                     BytesView nonce) {
  ByteWriter w(96);
  w.raw(kHs1Context, 8);
  w.raw(initiator.bytes.data(), 16);
  w.raw(responder.bytes.data(), 16);
  w.raw(eph);
  w.raw(nonce);
  return w.take();
}

Bytes hs2_transcript(const Guid& initiator, const Guid& responder, BytesView eph_i,
                     BytesView nonce_i, BytesView eph_r, BytesView nonce_r) {
  ByteWriter w(160);
  w.raw(kHs2Context, 8);
  w.raw(initiator.bytes.data(), 16);
  w.raw(responder.bytes.data(), 16);
  w.raw(eph_i);
  w.raw(nonce_i);
  w.raw(eph_r);
  w.raw(nonce_r);
  return w.take();
}

}  // namespace

SecurityEngine::SecurityEngine(ParticipantIdentity identity, Guid self_participant)
    : identity_(std::move(identity)), self_(self_participant) {}

void SecurityEngine::sign_announcement(Bytes& body, Bytes& cert, Bytes& perms,
                                       Bytes& signature) const {
  cert = encode_certificate(identity_.certificate);
  perms = encode_permissions(identity_.permissions);
  auto sig = ed25519_sign(identity_.private_key, body);
  signature = sig.ok() ? sig.value() : Bytes{};
}

Result<SecurityEngine::VerifiedPeer> SecurityEngine::verify_announcement(
    BytesView body, BytesView cert_bytes, BytesView perm_bytes, BytesView signature,
    uint64_t now_wall_ns) const {
  auto cert = decode_certificate(cert_bytes);
  if (!cert.ok()) return cert.error();
  if (auto st = verify_certificate(cert.value(), identity_.anchor_public, now_wall_ns); !st.ok())
    return st.error();
  if (!ed25519_verify(cert.value().public_key, body, signature))
    return Error{Errc::auth_failure, "announcement signature does not verify"};
  auto perms = decode_permissions(perm_bytes);
  if (!perms.ok()) return perms.error();
  if (auto st = verify_permissions(perms.value(), identity_.anchor_public); !st.ok())
    return st.error();
  if (perms.value().subject != cert.value().subject)
    return Error{Errc::auth_failure, "permissions subject does not match certificate"};
  VerifiedPeer peer;
  peer.certificate = std::move(cert.value());
  peer.permissions = std::move(perms.value());
  return peer;
}

Result<Bytes> SecurityEngine::start_handshake(const Guid& peer) {
  auto eph = x25519_generate();
  if (!eph.ok()) return eph.error();
  PendingHandshake pending;
  pending.eph_private = eph.value().private_key;
  pending.eph_public = eph.value().public_key;
  pending.nonce = random_bytes(kNonceLen);

  HandshakeMessage m;
  m.sender = self_;
  m.target = peer;
  m.cert = encode_certificate(identity_.certificate);
  m.eph_public = pending.eph_public;
  m.nonce = pending.nonce;
  auto sig = ed25519_sign(identity_.private_key,
                          hs1_transcript(self_, peer, m.eph_public, m.nonce));
  if (!sig.ok()) return sig.error();
  m.signature = sig.value();
  pending_[peer] = std::move(pending);
  return encode_handshake(m);
}

Result<Bytes> SecurityEngine::on_handshake_init(BytesView payload, uint64_t now_wall_ns) {
  auto m = decode_handshake(payload);
  if (!m.ok()) return m.error();
  const auto& init = m.value();
  if (!(init.target == self_)) return Error{Errc::auth_failure, "handshake not addressed to us"};

  auto cert = decode_certificate(init.cert);
  if (!cert.ok()) return cert.error();
  if (auto st = verify_certificate(cert.value(), identity_.anchor_public, now_wall_ns);
      !st.ok()) {
    ++auth_failures_;
    return st.error();
  }
  if (!ed25519_verify(cert.value().public_key,
                      hs1_transcript(init.sender, self_, init.eph_public, init.nonce),
                      init.signature)) {
    ++auth_failures_;
    return Error{Errc::auth_failure, "handshake init signature does not verify"};
  }

  auto eph = x25519_generate();
  if (!eph.ok()) return eph.error();
  Bytes nonce_r = random_bytes(kNonceLen);

  auto shared = x25519_shared(eph.value().private_key, init.eph_public);
  if (!shared.ok()) return shared.error();
  if (auto st = establish(init.sender, /*initiator=*/false, shared.value(), init.nonce, nonce_r,
                          init.sender, self_);
      !st.ok())
    return st.error();

  HandshakeMessage reply;
  reply.sender = self_;
  reply.target = init.sender;
  reply.cert = encode_certificate(identity_.certificate);
  reply.eph_public = eph.value().public_key;
  reply.nonce = nonce_r;
  auto sig = ed25519_sign(identity_.private_key,
                          hs2_transcript(init.sender, self_, init.eph_public, init.nonce,
                                         reply.eph_public, nonce_r));
  if (!sig.ok()) return sig.error();
  reply.signature = sig.value();
  return encode_handshake(reply);
}

Status SecurityEngine::on_handshake_reply(BytesView payload, uint64_t now_wall_ns) {
  auto m = decode_handshake(payload);
  if (!m.ok()) return m.error();
  const auto& reply = m.value();
  if (!(reply.target == self_)) return Error{Errc::auth_failure, "handshake not addressed to us"};

  auto pending = pending_.find(reply.sender);
  if (pending == pending_.end())
    return Error{Errc::auth_failure, "no pending handshake for peer"};

  auto cert = decode_certificate(reply.cert);
  if (!cert.ok()) return cert.error();
  if (auto st = verify_certificate(cert.value(), identity_.anchor_public, now_wall_ns);
      !st.ok()) {
    ++auth_failures_;
    return st;
  }
  if (!ed25519_verify(cert.value().public_key,
                      hs2_transcript(self_, reply.sender, pending->second.eph_public,
                                     pending->second.nonce, reply.eph_public, reply.nonce),
                      reply.signature)) {
    ++auth_failures_;
    return Error{Errc::auth_failure, "handshake reply signature does not verify"};
  }

  auto shared = x25519_shared(pending->second.eph_private, reply.eph_public);
  if (!shared.ok()) return shared.error();
  auto st = establish(reply.sender, /*initiator=*/true, shared.value(), pending->second.nonce,
                      reply.nonce, self_, reply.sender);
  pending_.erase(pending);
  return st;
}

Status SecurityEngine::establish(const Guid& peer, bool initiator, BytesView shared,
                                 BytesView nonce_i, BytesView nonce_r,
                                 const Guid& initiator_guid, const Guid& responder_guid) {
  ByteWriter salt(kNonceLen * 2);
  salt.raw(nonce_i);
  salt.raw(nonce_r);
  ByteWriter info(48);
  info.raw("mbus-session-v1", 15);
  info.raw(initiator_guid.bytes.data(), 16);
  info.raw(responder_guid.bytes.data(), 16);

  auto okm = hkdf_sha256(shared, BytesView(salt.data()), BytesView(info.data()), 72);
  if (!okm.ok()) return okm.error();
  const Bytes& k = okm.value();

  Session s;
  Bytes key_i2r(k.begin(), k.begin() + 32);
  Bytes key_r2i(k.begin() + 32, k.begin() + 64);
  uint32_t salt_i2r, salt_r2i;
  std::memcpy(&salt_i2r, k.data() + 64, 4);
  std::memcpy(&salt_r2i, k.data() + 68, 4);
  if (initiator) {
    s.key_tx = std::move(key_i2r);
    s.key_rx = std::move(key_r2i);
    s.salt_tx = salt_i2r;
    s.salt_rx = salt_r2i;
  } else {
    s.key_tx = std::move(key_r2i);
    s.key_rx = std::move(key_i2r);
    s.salt_tx = salt_r2i;
    s.salt_rx = salt_i2r;
  }
  ByteWriter kcv_info(20);
  kcv_info.raw("kcv", 3);
  auto kcv = hkdf_sha256(shared, BytesView(salt.data()), BytesView(kcv_info.data()), 8);
  if (!kcv.ok()) return kcv.error();
  s.kcv = kcv.value();
  sessions_[peer] = std::move(s);
  return {};
}

Result<Bytes> SecurityEngine::key_check_value(const Guid& peer) const {
  auto it = sessions_.find(peer);
  if (it == sessions_.end()) return Error{Errc::unavailable, "no session"};
  return it->second.kcv;
}

Result<Bytes> SecurityEngine::seal_datagram(const Guid& peer, transport::PacketHeader header,
                                            BytesView payload) {
  auto it = sessions_.find(peer);
  if (it == sessions_.end()) return Error{Errc::unavailable, "no session with peer"};
  Session& s = it->second;
  if (s.seal_counter == UINT64_MAX)
    return Error{Errc::rekey_required, "seal counter exhausted; session rekey required"};
  uint64_t counter = ++s.seal_counter;

  header.flags |= transport::kFlagEncrypted;
  size_t sealed_len = 8 + payload.size() + kTagBytes;
  if (sealed_len > 0xFFFF) return Error{Errc::validation_error, "sealed payload too large"};
  header.payload_len = static_cast<uint16_t>(sealed_len);
  Bytes aad = transport::encode_header(header);

  ByteWriter nonce(kNonceBytes);
  nonce.u64(counter);
  nonce.u32(s.salt_tx);
  auto ct = aes256gcm_seal(s.key_tx, BytesView(nonce.data()), aad, payload);
  if (!ct.ok()) return ct.error();

  ByteWriter out(transport::kHeaderSize + sealed_len);
  out.raw(aad);
  out.u64(counter);
  out.raw(ct.value());
  return out.take();
}

bool SecurityEngine::replay_check_and_mark(Session& s, uint64_t counter) {
  if (counter == 0) return false;
  if (counter > s.replay_highest) {
    uint64_t shift = counter - s.replay_highest;
    if (shift >= kReplayWindow) {
      std::fill(s.replay_window.begin(), s.replay_window.end(), false);
    } else {
      // slide: drop the oldest `shift` slots
      for (uint64_t i = 0; i < shift; ++i)
        s.replay_window[(s.replay_highest + 1 + i) % kReplayWindow] = false;
    }
    s.replay_highest = counter;
    s.replay_window[counter % kReplayWindow] = true;
    return true;
  }
  if (s.replay_highest - counter >= kReplayWindow) return false;  // too old to judge
  if (s.replay_window[counter % kReplayWindow]) return false;     // seen
  s.replay_window[counter % kReplayWindow] = true;
  return true;
}

Result<Bytes> SecurityEngine::open_datagram(const Guid& peer,
                                            const transport::PacketHeader& header,
                                            BytesView sealed_payload) {
  auto it = sessions_.find(peer);
  if (it == sessions_.end()) {
    ++auth_failures_;
    return Error{Errc::unavailable, "no session with peer"};
  }
  Session& s = it->second;
  if (!(header.flags & transport::kFlagEncrypted) || sealed_payload.size() < 8 + kTagBytes) {
    ++auth_failures_;
    return Error{Errc::auth_failure, "not a sealed payload"};
  }
  ByteReader r(sealed_payload);
  uint64_t counter = r.u64();
  if (!replay_check_and_mark(s, counter)) {
    ++replay_drops_;
    return Error{Errc::auth_failure, "replayed seal counter"};
  }
  ByteWriter nonce(kNonceBytes);
  nonce.u64(counter);
  nonce.u32(s.salt_rx);
  Bytes aad = transport::encode_header(header);
  auto pt = aes256gcm_open(s.key_rx, BytesView(nonce.data()), aad,
                           sealed_payload.subspan(8));
  if (!pt.ok()) {
    ++auth_failures_;
    return pt.error();
  }
  return pt;
}

void SecurityEngine::set_seal_counter_for_test(const Guid& peer, uint64_t value) {
  auto it = sessions_.find(peer);
  if (it != sessions_.end()) it->second.seal_counter = value;
}

}  // namespace mbus::security
