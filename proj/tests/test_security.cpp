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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "mbus/security/crypto.hpp"
#include "mbus/security/identity.hpp"
#include "mbus/security/keystore.hpp"
#include "mbus/security/session.hpp"

using namespace mbus;
using namespace mbus::security;
using namespace std::chrono_literals;

namespace {

std::string temp_dir(const char* tag) {
  auto dir = std::filesystem::temp_directory_path() /
             (std::string("mbus_sec_") + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

Guid part_guid(uint8_t fill) {
  Guid g;
  for (size_t i = 0; i < 12; ++i) g.bytes[i] = fill;
  return g;
}

// Keystore with two provisioned identities, shared by several tests.
struct Deployment {
  Keystore ks;
  ParticipantIdentity robot1, robot2;

  explicit Deployment(const std::string& root) : ks(root) {
    REQUIRE(ks.create_anchor().ok());
    REQUIRE(ks.create_identity("robot1", 24h).ok());
    REQUIRE(ks.create_identity("robot2", 24h).ok());
    REQUIRE(ks.create_permissions("robot1", {{RuleDirection::Pub, "cmd_*"},
                                             {RuleDirection::Sub, "scan"}})
                .ok());
    REQUIRE(ks.create_permissions("robot2", {{RuleDirection::Pub, "*"},
                                             {RuleDirection::Sub, "*"}})
                .ok());
    robot1 = ks.load("robot1").value();
    robot2 = ks.load("robot2").value();
  }
};

}  // namespace

TEST_CASE("x25519 agreement matches RFC 7748 section 6.1 vectors") {
  Bytes a_priv = from_hex("77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a");
  Bytes b_priv = from_hex("5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb");
  Bytes a_pub = from_hex("8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a");
  Bytes b_pub = from_hex("de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f");
  Bytes shared = from_hex("4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c1e161742");

  auto s1 = x25519_shared(a_priv, b_pub);
  auto s2 = x25519_shared(b_priv, a_pub);
  REQUIRE(s1.ok());
  REQUIRE(s2.ok());
  CHECK(s1.value() == shared);
  CHECK(s2.value() == shared);
}

TEST_CASE("ed25519 matches RFC 8032 test 1") {
  Bytes sk = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  Bytes pk = from_hex("d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  Bytes expected_sig = from_hex(
      "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
      "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");

  auto sig = ed25519_sign(sk, {});
  REQUIRE(sig.ok());
  CHECK(sig.value() == expected_sig);
  CHECK(ed25519_verify(pk, {}, sig.value()));
  Bytes tampered = sig.value();
  tampered[0] ^= 1;
  CHECK(!ed25519_verify(pk, {}, tampered));
}

TEST_CASE("aes-256-gcm matches the zero-key reference vectors") {
  Bytes key(32, 0), nonce(12, 0);
  auto empty = aes256gcm_seal(key, nonce, {}, {});
  REQUIRE(empty.ok());
  CHECK(empty.value() == from_hex("530f8afbc74536b9a963b4f1c4cb738b"));

  Bytes pt(16, 0);
  auto sealed = aes256gcm_seal(key, nonce, {}, pt);
  REQUIRE(sealed.ok());
  CHECK(sealed.value() ==
        from_hex("cea7403d4d606b6e074ec5d3baf39d18d0d1c8a799996bf0265b98b5d48ab919"));

  auto opened = aes256gcm_open(key, nonce, {}, sealed.value());
  REQUIRE(opened.ok());
  CHECK(opened.value() == pt);
}

TEST_CASE("aead: any bit flip in ciphertext or aad fails authentication") {
  Bytes key = random_bytes(32), nonce = random_bytes(12);
  Bytes aad = random_bytes(46), pt = random_bytes(100);
  auto sealed = aes256gcm_seal(key, nonce, aad, pt).value();

  Bytes flipped = sealed;
  flipped[10] ^= 0x40;
  CHECK(aes256gcm_open(key, nonce, aad, flipped).error().code == Errc::auth_failure);

  Bytes bad_aad = aad;
  bad_aad[3] ^= 1;
  CHECK(aes256gcm_open(key, nonce, bad_aad, sealed).error().code == Errc::auth_failure);

  Bytes other_key = random_bytes(32);
  CHECK(aes256gcm_open(other_key, nonce, aad, sealed).error().code == Errc::auth_failure);

  CHECK(aes256gcm_open(key, nonce, aad, sealed).ok());
}

TEST_CASE("keystore: generate, verify, refuse duplicates, wrong anchor fails") {
  Deployment dep(temp_dir("ks"));
  uint64_t now = wall_now_ns();

  CHECK(dep.ks.verify("robot1", now).ok());
  CHECK(dep.ks.verify("robot2", now).ok());
  CHECK(dep.ks.subjects() == std::vector<std::string>{"robot1", "robot2"});

  // generate "robot1" again: refused without overwrite
  CHECK(dep.ks.create_identity("robot1", 24h).code() == Errc::name_conflict);
  CHECK(dep.ks.create_identity("robot1", 24h, /*overwrite=*/true).ok());

  // verify(cert, anchor_pub) with the wrong anchor: false
  Keystore other(temp_dir("ks2"));
  REQUIRE(other.create_anchor().ok());
  auto cert = dep.ks.load("robot2").value().certificate;
  CHECK(verify_certificate(cert, other.anchor_public().value(), now).code() ==
        Errc::auth_failure);

  // expired validity: verification error
  CHECK(verify_certificate(cert, dep.ks.anchor_public().value(),
                           cert.valid_to_wall_ns + 1)
            .code() == Errc::auth_failure);

  // container type confusion is rejected
  auto wrong = read_key_object(dep.ks.root() + "/anchor.pub.mkey", KeyObjectType::Permissions);
  CHECK(wrong.error().code == Errc::decode_error);
}

TEST_CASE("glob authorization: direction-scoped, deny by default") {
  PermissionsDocument doc;
  doc.subject = "r";
  doc.rules = {{RuleDirection::Pub, "cmd_*"}};
  CHECK(authorize(doc, RuleDirection::Pub, "cmd_vel"));
  CHECK(!authorize(doc, RuleDirection::Sub, "cmd_vel"));  // direction mismatch
  CHECK(!authorize(doc, RuleDirection::Pub, "scan"));

  PermissionsDocument empty;
  CHECK(!authorize(empty, RuleDirection::Pub, "anything"));
  CHECK(!authorize(empty, RuleDirection::Sub, "anything"));

  CHECK(glob_match("*", "anything"));
  CHECK(glob_match("a?c", "abc"));
  CHECK(!glob_match("a?c", "ac"));
  CHECK(glob_match("/svc/*/request", "/svc/adder/add/request"));
  CHECK(!glob_match("cmd_*", "cm"));
}

TEST_CASE("handshake: both sides derive equal keys") {
  Deployment dep(temp_dir("hs"));
  auto g1 = part_guid(1), g2 = part_guid(2);
  SecurityEngine e1(dep.robot1, g1);
  SecurityEngine e2(dep.robot2, g2);
  uint64_t now = wall_now_ns();

  REQUIRE(e1.should_initiate(g2));
  auto hs1 = e1.start_handshake(g2);
  REQUIRE(hs1.ok());
  auto hs2 = e2.on_handshake_init(hs1.value(), now);
  REQUIRE(hs2.ok());
  REQUIRE(e1.on_handshake_reply(hs2.value(), now).ok());

  REQUIRE(e1.session_ready(g2));
  REQUIRE(e2.session_ready(g1));
  CHECK(e1.key_check_value(g2).value() == e2.key_check_value(g1).value());
}

TEST_CASE("handshake: tampered ephemeral value is rejected") {
  Deployment dep(temp_dir("hs_tamper"));
  auto g1 = part_guid(1), g2 = part_guid(2);
  SecurityEngine e1(dep.robot1, g1);
  SecurityEngine e2(dep.robot2, g2);
  uint64_t now = wall_now_ns();

  auto hs1 = e1.start_handshake(g2).value();
  // attacker substitutes bytes of the ephemeral public value (inside blobs,
  // offset: 16+16 guids + 4-byte cert length prefix .. find eph by flipping a
  // byte near the end of the message body, before nonce+sig blobs)
  Bytes tampered = hs1;
  tampered[tampered.size() - kSigBytes - 4 - kNonceBytes - 4 - 10] ^= 0x1;
  auto reply = e2.on_handshake_init(tampered, now);
  CHECK(!reply.ok());
  CHECK(e2.auth_failures() == 1);
  CHECK(!e2.session_ready(g1));
}

TEST_CASE("handshake: certificate from a different anchor is rejected") {
  Deployment dep(temp_dir("hs_anchor"));
  // a third participant provisioned under a different trust anchor
  Keystore rogue_ks(temp_dir("hs_rogue"));
  REQUIRE(rogue_ks.create_anchor().ok());
  REQUIRE(rogue_ks.create_identity("intruder", 24h).ok());
  REQUIRE(rogue_ks.create_permissions("intruder", {{RuleDirection::Pub, "*"}}).ok());
  auto intruder = rogue_ks.load("intruder").value();
  uint64_t now = wall_now_ns();

  auto g1 = part_guid(1), g3 = part_guid(3);
  SecurityEngine legit(dep.robot1, g1);
  SecurityEngine rogue(intruder, g3);

  auto hs1 = rogue.start_handshake(g1);  // rogue initiates toward legit...
  REQUIRE(hs1.ok());
  auto reply = legit.on_handshake_init(hs1.value(), now);
  CHECK(!reply.ok());
  CHECK(legit.auth_failures() == 1);
  CHECK(!legit.session_ready(g3));
}

TEST_CASE("sealed datagrams: round trip, bit flips, wrong pair key, replay") {
  Deployment dep(temp_dir("seal"));
  auto g1 = part_guid(1), g2 = part_guid(2);
  SecurityEngine e1(dep.robot1, g1);
  SecurityEngine e2(dep.robot2, g2);
  uint64_t now = wall_now_ns();
  auto hs1 = e1.start_handshake(g2).value();
  auto hs2 = e2.on_handshake_init(hs1, now).value();
  REQUIRE(e1.on_handshake_reply(hs2, now).ok());

  transport::PacketHeader h;
  h.kind = transport::PacketKind::Data;
  h.writer_guid = g1.with_entity(1);
  h.topic_id = 777;
  h.seq = 1;
  Bytes payload = random_bytes(200);

  auto datagram = e1.seal_datagram(g2, h, payload);
  REQUIRE(datagram.ok());
  auto decoded = transport::decode_packet(datagram.value());
  REQUIRE(decoded.ok());
  CHECK((decoded.value().header.flags & transport::kFlagEncrypted) != 0);

  auto opened = e2.open_datagram(g1, decoded.value().header, decoded.value().payload);
  REQUIRE(opened.ok());
  CHECK(opened.value() == payload);

  // replay of the captured datagram is rejected
  auto replayed = e2.open_datagram(g1, decoded.value().header, decoded.value().payload);
  CHECK(!replayed.ok());
  CHECK(e2.replay_drops() == 1);

  // header (associated data) tamper: authentication failure
  auto datagram2 = e1.seal_datagram(g2, h, payload).value();
  auto dec2 = transport::decode_packet(datagram2).value();
  auto tampered_header = dec2.header;
  tampered_header.seq = 999;  // bind routing metadata
  CHECK(e2.open_datagram(g1, tampered_header, dec2.payload).error().code == Errc::auth_failure);

  // ciphertext bit flip
  auto datagram3 = e1.seal_datagram(g2, h, payload).value();
  auto dec3 = transport::decode_packet(datagram3).value();
  Bytes bad(dec3.payload.begin(), dec3.payload.end());
  bad[20] ^= 0x80;
  CHECK(e2.open_datagram(g1, dec3.header, bad).error().code == Errc::auth_failure);

  // a different pair's key cannot open it (third engine with its own session)
  Keystore third_ks(dep.ks.root());
  REQUIRE(third_ks.create_identity("robot3", 24h).ok());
  REQUIRE(third_ks.create_permissions("robot3", {{RuleDirection::Sub, "*"}}).ok());
  auto g3 = part_guid(3);
  SecurityEngine e3(third_ks.load("robot3").value(), g3);
  auto hs1b = e3.start_handshake(g2).value();  // g3 < ... establishes own pair
  auto hs2b = e2.on_handshake_init(hs1b, wall_now_ns()).value();
  REQUIRE(e3.on_handshake_reply(hs2b, wall_now_ns()).ok());
  auto datagram4 = e1.seal_datagram(g2, h, payload).value();
  auto dec4 = transport::decode_packet(datagram4).value();
  CHECK(!e3.open_datagram(g2, dec4.header, dec4.payload).ok());
}

TEST_CASE("nonce exhaustion surfaces rekey_required") {
  Deployment dep(temp_dir("rekey"));
  auto g1 = part_guid(1), g2 = part_guid(2);
  SecurityEngine e1(dep.robot1, g1);
  SecurityEngine e2(dep.robot2, g2);
  uint64_t now = wall_now_ns();
  auto hs1 = e1.start_handshake(g2).value();
  auto hs2 = e2.on_handshake_init(hs1, now).value();
  REQUIRE(e1.on_handshake_reply(hs2, now).ok());

  e1.set_seal_counter_for_test(g2, UINT64_MAX);
  transport::PacketHeader h;
  CHECK(e1.seal_datagram(g2, h, Bytes{1, 2, 3}).error().code == Errc::rekey_required);
}

TEST_CASE("announcement signing and verification") {
  Deployment dep(temp_dir("ann"));
  auto g1 = part_guid(1), g2 = part_guid(2);
  SecurityEngine e1(dep.robot1, g1);
  SecurityEngine e2(dep.robot2, g2);
  uint64_t now = wall_now_ns();

  Bytes body = random_bytes(300);
  Bytes cert, perms, sig;
  e1.sign_announcement(body, cert, perms, sig);
  auto peer = e2.verify_announcement(body, cert, perms, sig, now);
  REQUIRE(peer.ok());
  CHECK(peer.value().certificate.subject == "robot1");
  CHECK(authorize(peer.value().permissions, RuleDirection::Pub, "cmd_vel"));
  CHECK(!authorize(peer.value().permissions, RuleDirection::Pub, "scan"));

  Bytes tampered_body = body;
  tampered_body[5] ^= 1;
  CHECK(!e2.verify_announcement(tampered_body, cert, perms, sig, now).ok());
}
