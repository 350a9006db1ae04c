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

#include <random>

#include "mbus/discovery/announcement.hpp"
#include "mbus/discovery/graph.hpp"
#include "mbus/discovery/qos_matching.hpp"

using namespace mbus;
using namespace mbus::discovery;
using namespace std::chrono_literals;
using transport::Durability;
using transport::Liveliness;
using transport::QosProfile;
using transport::Reliability;

namespace {

Guid part_guid(uint8_t fill) {
  Guid g;
  for (size_t i = 0; i < 12; ++i) g.bytes[i] = fill;
  return g;
}

MonoTime t0() { return mono_from_ns(1'000'000'000); }

EndpointInfo endpoint(const Guid& participant, uint32_t entity, EndpointDirection dir,
                      const std::string& topic, uint64_t hash, QosProfile qos = {}) {
  EndpointInfo e;
  e.direction = dir;
  e.topic_name = topic;
  e.type_name = "t/T";
  e.type_hash = hash;
  e.qos = qos;
  e.endpoint_guid = participant.with_entity(entity);
  e.owning_node = "/n" + std::to_string(entity);
  return e;
}

ParticipantAnnouncement announcement(const Guid& guid, uint64_t seq,
                                     std::vector<EndpointInfo> endpoints,
                                     Duration lease = 3s) {
  ParticipantAnnouncement a;
  a.participant_guid = guid;
  a.address = 0x7f000001;
  a.port = 4000 + guid.bytes[0];
  a.nodes = {"/node" + std::to_string(guid.bytes[0])};
  a.endpoints = std::move(endpoints);
  a.lease_duration = lease;
  a.announcement_seq = seq;
  return a;
}

size_t count_kind(const std::vector<GraphEvent>& events, GraphEventKind kind) {
  size_t n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("announcement codec round trip") {
  auto pg = part_guid(1);
  QosProfile q;
  q.deadline = 50ms;
  q.lifespan = 2s;
  q.lease_duration = 1s;
  q.durability = Durability::TransientLocal;
  auto a = announcement(pg, 7,
                        {endpoint(pg, 1, EndpointDirection::Publisher, "scan", 0xabc, q),
                         endpoint(pg, 2, EndpointDirection::ServiceServer, "/svc/x", 0xdef)});
  a.nodes = {"/front/camera", "/front/lidar"};

  auto bytes = encode_announcement(a);
  auto back = decode_announcement(bytes);
  REQUIRE(back.ok());
  const auto& b = back.value();
  CHECK(b.participant_guid == a.participant_guid);
  CHECK(b.port == a.port);
  CHECK(b.announcement_seq == 7);
  CHECK(b.lease_duration == 3s);
  CHECK(b.nodes == a.nodes);
  REQUIRE(b.endpoints.size() == 2);
  CHECK(b.endpoints[0] == a.endpoints[0]);
  CHECK(b.endpoints[1] == a.endpoints[1]);

  Bytes truncated(bytes.begin(), bytes.end() - 3);
  CHECK(!decode_announcement(truncated).ok());
  Bytes trailing = bytes;
  trailing.push_back(0);
  CHECK(!decode_announcement(trailing).ok());
}

TEST_CASE("qos_compatible: request-offered rule basics") {
  QosProfile best_effort = QosProfile::best_effort();
  QosProfile reliable;  // defaults are reliable/volatile

  auto c1 = qos_compatible(best_effort, reliable);
  CHECK(!c1.compatible);
  REQUIRE(c1.reasons.size() == 1);
  CHECK(c1.reasons[0] == QosPolicy::Reliability);

  CHECK(qos_compatible(reliable, best_effort).compatible);
  CHECK(qos_compatible(reliable, reliable).compatible);
  CHECK(qos_compatible(best_effort, best_effort).compatible);
}

TEST_CASE("qos_compatible: durability, deadline, liveliness, lease dimensions") {
  QosProfile vol, tl;
  tl.durability = Durability::TransientLocal;
  CHECK(!qos_compatible(vol, tl).compatible);
  CHECK(qos_compatible(tl, vol).compatible);

  QosProfile dl_fast, dl_slow, dl_none;
  dl_fast.deadline = 10ms;
  dl_slow.deadline = 100ms;
  CHECK(qos_compatible(dl_fast, dl_slow).compatible);   // offers tighter than asked
  CHECK(!qos_compatible(dl_slow, dl_fast).compatible);  // offers looser than asked
  CHECK(!qos_compatible(dl_none, dl_fast).compatible);  // absent = infinite
  CHECK(qos_compatible(dl_fast, dl_none).compatible);
  CHECK(qos_compatible(dl_none, dl_none).compatible);

  QosProfile live_auto, live_manual;
  live_manual.liveliness = Liveliness::Manual;
  CHECK(!qos_compatible(live_auto, live_manual).compatible);
  CHECK(qos_compatible(live_manual, live_auto).compatible);

  QosProfile lease_short, lease_long, lease_none;
  lease_short.lease_duration = 1s;
  lease_long.lease_duration = 10s;
  CHECK(qos_compatible(lease_short, lease_long).compatible);
  CHECK(!qos_compatible(lease_long, lease_short).compatible);
  CHECK(!qos_compatible(lease_none, lease_short).compatible);
}

TEST_CASE("qos_compatible: history and lifespan never affect matching") {
  QosProfile a = QosProfile::reliable_keep_last(1);
  QosProfile b = QosProfile::reliable_keep_all();
  b.lifespan = 5ms;
  CHECK(qos_compatible(a, b).compatible);
  CHECK(qos_compatible(b, a).compatible);
}

TEST_CASE("qos_compatible: reflexive, and upgrading an offer never breaks a match") {
  std::mt19937_64 rng(99);
  auto random_profile = [&rng]() {
    QosProfile q;
    q.reliability = rng() % 2 ? Reliability::Reliable : Reliability::BestEffort;
    q.durability = rng() % 2 ? Durability::TransientLocal : Durability::Volatile;
    q.liveliness = rng() % 2 ? Liveliness::Manual : Liveliness::Automatic;
    if (rng() % 2) q.deadline = Duration(1ms * (1 + rng() % 200));
    if (rng() % 2) q.lease_duration = Duration(1ms * (1 + rng() % 200));
    if (rng() % 2) q.lifespan = Duration(1ms * (1 + rng() % 200));
    return q;
  };
  auto upgrade = [&rng](QosProfile q) {
    switch (rng() % 5) {
      case 0: q.reliability = Reliability::Reliable; break;
      case 1: q.durability = Durability::TransientLocal; break;
      case 2: q.liveliness = Liveliness::Manual; break;
      case 3:
        if (q.deadline) q.deadline = *q.deadline / 2 + 1ms;
        break;
      default:
        if (q.lease_duration) q.lease_duration = *q.lease_duration / 2 + 1ms;
        break;
    }
    return q;
  };

  for (int i = 0; i < 2000; ++i) {
    QosProfile offered = random_profile();
    QosProfile requested = random_profile();
    CHECK(qos_compatible(offered, offered).compatible);  // reflexivity
    if (qos_compatible(offered, requested).compatible) {
      CHECK(qos_compatible(upgrade(offered), requested).compatible);  // monotone
    }
  }
}

TEST_CASE("graph: compatible pub/sub pair matches exactly once") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  auto ev1 = g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 0xabc)}),
      t0());
  CHECK(count_kind(ev1, GraphEventKind::ParticipantDiscovered) == 1);
  CHECK(count_kind(ev1, GraphEventKind::Matched) == 0);

  auto ev2 = g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 0xabc)}), t0());
  CHECK(count_kind(ev2, GraphEventKind::Matched) == 1);
  CHECK(g.matched(p2.with_entity(1), p1.with_entity(1)));

  // re-received identical announcement: idempotent, no events
  auto ev3 = g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 0xabc)}), t0());
  CHECK(ev3.empty());

  // stale lower sequence: ignored
  auto ev4 = g.process_announcement(announcement(p2, 0, {}), t0());
  CHECK(ev4.empty());
  CHECK(g.matched(p2.with_entity(1), p1.with_entity(1)));
}

TEST_CASE("graph: same topic, different type hash raises TYPE_MISMATCH once") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 0xAAA)}),
      t0());
  auto ev = g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 0xBBB)}), t0());
  CHECK(count_kind(ev, GraphEventKind::TypeMismatch) == 1);
  CHECK(count_kind(ev, GraphEventKind::Matched) == 0);

  // repeating the snapshot does not re-raise
  auto ev2 = g.process_announcement(
      announcement(p2, 2, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 0xBBB)}), t0());
  CHECK(count_kind(ev2, GraphEventKind::TypeMismatch) == 0);
}

TEST_CASE("graph: incompatible qos raises INCOMPATIBLE_QOS with reasons") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  QosProfile sub_q;  // requests reliable
  QosProfile pub_q = QosProfile::best_effort();
  g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 1, sub_q)}),
      t0());
  auto ev = g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 1, pub_q)}),
      t0());
  REQUIRE(count_kind(ev, GraphEventKind::IncompatibleQos) == 1);
  for (const auto& e : ev)
    if (e.kind == GraphEventKind::IncompatibleQos) {
      REQUIRE(e.reasons.size() == 1);
      CHECK(e.reasons[0] == QosPolicy::Reliability);
    }
}

TEST_CASE("graph: endpoint removal unmatches") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 1)}), t0());
  g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 1)}), t0());
  REQUIRE(g.matched(p2.with_entity(1), p1.with_entity(1)));

  auto ev = g.process_announcement(announcement(p2, 2, {}), t0());
  CHECK(count_kind(ev, GraphEventKind::Unmatched) == 1);
  CHECK(!g.matched(p2.with_entity(1), p1.with_entity(1)));
}

TEST_CASE("graph: lease expiry removes participants and their matches") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 1)}), t0());
  g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 1)}), t0());

  // heartbeat within lease: retained
  g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 1)}),
      t0() + 2s);
  CHECK(g.expire_stale(t0() + 3s).empty());
  CHECK(g.participant_count() == 2);

  // silent past the lease: participant-lost + unmatch (p1 also expires here)
  auto ev = g.expire_stale(t0() + 5s + 600ms);
  CHECK(count_kind(ev, GraphEventKind::ParticipantLost) == 2);
  CHECK(count_kind(ev, GraphEventKind::Unmatched) == 1);
  CHECK(g.participant_count() == 0);
}

TEST_CASE("graph: two participants expiring in one tick emit in guid order") {
  GraphView g;
  auto pa = part_guid(3), pb = part_guid(1);  // insert out of order on purpose
  g.process_announcement(announcement(pa, 1, {}), t0());
  g.process_announcement(announcement(pb, 1, {}), t0());
  auto ev = g.expire_stale(t0() + 10s);
  REQUIRE(count_kind(ev, GraphEventKind::ParticipantLost) == 2);
  CHECK(ev[0].participant == pb);  // lower guid first
  CHECK(ev[1].participant == pa);
}

TEST_CASE("graph symmetry: both sides agree on the matched set") {
  auto p1 = part_guid(1), p2 = part_guid(2);
  QosProfile tl = QosProfile::transient_local(4);
  auto a1 = announcement(p1, 3,
                         {endpoint(p1, 1, EndpointDirection::Publisher, "a", 1, tl),
                          endpoint(p1, 2, EndpointDirection::Subscription, "b", 2),
                          endpoint(p1, 3, EndpointDirection::Subscription, "c", 3)});
  auto a2 = announcement(p2, 5,
                         {endpoint(p2, 1, EndpointDirection::Subscription, "a", 1),
                          endpoint(p2, 2, EndpointDirection::Publisher, "b", 2),
                          endpoint(p2, 3, EndpointDirection::Publisher, "c", 999)});

  GraphView g1, g2;
  g1.process_announcement(a1, t0());
  g1.process_announcement(a2, t0());
  g2.process_announcement(a2, t0());
  g2.process_announcement(a1, t0());

  for (const auto& [w, r] : {std::pair{p1.with_entity(1), p2.with_entity(1)},
                             std::pair{p2.with_entity(2), p1.with_entity(2)},
                             std::pair{p2.with_entity(3), p1.with_entity(3)}}) {
    CHECK(g1.matched(w, r) == g2.matched(w, r));
  }
  CHECK(g1.matched(p1.with_entity(1), p2.with_entity(1)));
  CHECK(g1.matched(p2.with_entity(2), p1.with_entity(2)));
  CHECK(!g1.matched(p2.with_entity(3), p1.with_entity(3)));  // type mismatch
}

TEST_CASE("graph: node and topic inventories") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  auto a1 = announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Publisher, "scan", 1)});
  a1.nodes = {"/front/camera"};
  auto a2 = announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Subscription, "cmd", 2)});
  a2.nodes = {"/base/motor"};
  g.process_announcement(a1, t0());
  g.process_announcement(a2, t0());
  CHECK(g.node_names() == std::vector<std::string>{"/base/motor", "/front/camera"});
  CHECK(g.topic_names() == std::vector<std::string>{"cmd", "scan"});
  CHECK(g.endpoints_on_topic("scan").size() == 1);
}

TEST_CASE("graph: endpoint filter hides endpoints from matching") {
  GraphView g;
  auto p1 = part_guid(1), p2 = part_guid(2);
  g.set_endpoint_filter([&p2](const Guid& participant, const EndpointInfo&) {
    return !(participant == p2);  // everything from p2 is unauthorized
  });
  g.process_announcement(
      announcement(p1, 1, {endpoint(p1, 1, EndpointDirection::Subscription, "scan", 1)}), t0());
  auto ev = g.process_announcement(
      announcement(p2, 1, {endpoint(p2, 1, EndpointDirection::Publisher, "scan", 1)}), t0());
  CHECK(count_kind(ev, GraphEventKind::Matched) == 0);
  CHECK(!g.matched(p2.with_entity(1), p1.with_entity(1)));
}
