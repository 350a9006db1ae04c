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

#include "mbus/core/context.hpp"

#include <algorithm>
#include <thread>

#include "mbus/discovery/announcement.hpp"

namespace mbus::core {

using discovery::EndpointDirection;
using discovery::GraphEvent;
using discovery::GraphEventKind;
using transport::PacketHeader;
using transport::PacketKind;

Context::Context(ContextConfig cfg)
    : cfg_(std::move(cfg)), inbound_impairment_(cfg_.impairment) {}

Context::~Context() {
  shutdown();
  if (link_) link_->close();
}

Result<std::shared_ptr<Context>> Context::create(const ContextConfig& cfg) {
  auto link = open_udp_link(cfg);
  if (!link.ok()) return link.error();
  auto ctx = std::shared_ptr<Context>(new Context(cfg));
  if (auto st = ctx->init(std::move(link.value()), std::make_shared<SteadyClock>()); !st.ok())
    return st.error();
  return ctx;
}

Result<std::shared_ptr<Context>> Context::create_with_link(const ContextConfig& cfg,
                                                           std::unique_ptr<DatagramLink> link,
                                                           std::shared_ptr<Clock> clock) {
  auto ctx = std::shared_ptr<Context>(new Context(cfg));
  if (auto st = ctx->init(std::move(link), std::move(clock)); !st.ok()) return st.error();
  return ctx;
}

Status Context::init(std::unique_ptr<DatagramLink> link, std::shared_ptr<Clock> clock) {
  clock_ = std::move(clock);
  sim_time_ = dynamic_cast<SimClock*>(clock_.get()) != nullptr;
  link_ = std::move(link);
  guid_ = make_participant_guid();

  for (const auto& peer : cfg_.static_peers) {
    auto loc = Locator::parse(peer);
    if (!loc) return Error{Errc::validation_error, "bad static peer '" + peer + "'"};
    static_peers_.push_back(*loc);
  }

  if (cfg_.security) {
    if (cfg_.keystore.empty() || cfg_.identity.empty())
      return Error{Errc::validation_error, "security enabled without keystore/identity"};
    security::Keystore ks(cfg_.keystore);
    if (auto st = ks.verify(cfg_.identity, wall_now_ns()); !st.ok()) return st;
    auto id = ks.load(cfg_.identity);
    if (!id.ok()) return id.error();
    security_ = std::make_unique<security::SecurityEngine>(std::move(id.value()), guid_);
    graph_.set_endpoint_filter([this](const Guid& participant, const discovery::EndpointInfo& ep) {
      return endpoint_authorized(participant, ep);
    });
  }

  link_->set_sink([this](Bytes datagram, Locator from) {
    on_link_datagram(std::move(datagram), from);
  });
  last_reassembly_prune_ = clock_->now();
  return {};
}

void Context::shutdown() { shutdown_.store(true); }

uint64_t Context::auth_failure_count() const {
  return (security_ ? security_->auth_failures() : 0) + unsecured_rejected_;
}

uint64_t Context::replay_drop_count() const {
  return security_ ? security_->replay_drops() : 0;
}

Guid Context::next_endpoint_guid() {
  return guid_.with_entity(next_entity_.fetch_add(1));
}

void Context::mark_announcement_dirty() { announce_dirty_ = true; }

void Context::post_work(WorkKind kind, std::function<bool()> run) {
  ready_.push_back({kind, std::move(run)});
}

void Context::register_sweep(std::weak_ptr<Sweepable> target) {
  sweeps_.push_back(std::move(target));
}

// ---------------------------------------------------------------- inbound --

void Context::on_link_datagram(Bytes datagram, Locator from) {
  std::lock_guard<std::mutex> lock(inbound_mu_);
  MonoTime now = clock_->now();
  MonoTime at = now;
  if (cfg_.impairment.enabled) {
    auto decision = inbound_impairment_.apply(datagram.size(), now);
    if (!decision.deliver) return;
    at = decision.at;
  }
  inbound_.push(Inbound{at, inbound_order_++, std::move(datagram), from});
  inbound_cv_.notify_one();
}

void Context::pump_inbound(MonoTime now) {
  for (;;) {
    Inbound item;
    {
      std::lock_guard<std::mutex> lock(inbound_mu_);
      if (inbound_.empty() || inbound_.top().at > now) return;
      item = std::move(const_cast<Inbound&>(inbound_.top()));
      inbound_.pop();
    }
    handle_datagram(item.data, item.from, now);
  }
}

void Context::handle_datagram(BytesView datagram, Locator from, MonoTime now) {
  ++datagrams_received_;
  auto decoded = transport::decode_packet(datagram);
  if (!decoded.ok()) {
    if (decoded.error().code == Errc::foreign_packet) {
      ++foreign_packets_;  // silently dropped at the socket layer
    } else {
      ++decode_errors_;
    }
    return;
  }
  const PacketHeader& h = decoded.value().header;
  BytesView payload = decoded.value().payload;

  if (h.kind == PacketKind::Discovery) {
    handle_discovery(h, payload, from, now);
    return;
  }

  Bytes plain;
  if (security_) {
    // Sender resolution: DATA and HEARTBEAT carry the remote writer; ACKNACK
    // carries our local writer, so the source locator identifies the peer.
    Guid peer = h.writer_guid.participant();
    if (h.kind == PacketKind::AckNack || !peer_locators_.count(peer)) {
      peer = Guid{};
      for (const auto& [guid, loc] : peer_locators_)
        if (loc == from) peer = guid;
      if (peer.is_nil()) {
        ++unsecured_rejected_;
        return;
      }
    }
    auto opened = security_->open_datagram(peer, h, payload);
    if (!opened.ok()) return;  // engine counted the failure
    plain = std::move(opened.value());
    payload = plain;
  }

  switch (h.kind) {
    case PacketKind::Data: handle_data(h, payload, now); break;
    case PacketKind::AckNack: handle_acknack(h, payload, now); break;
    case PacketKind::Heartbeat: handle_heartbeat(h, payload, now); break;
    default: break;
  }
}

void Context::handle_data(const PacketHeader& h, BytesView payload, MonoTime now) {
  for (auto& sub : subs_for_topic_id(h.topic_id)) {
    auto out = sub->reader_.on_data(h, payload, now);
    // deliveries, acks and loss events
    for (auto& msg : out.messages) {
      Subscription::Queued q;
      q.bytes = std::move(msg.payload);
      q.info.writer = msg.writer;
      q.info.seq = msg.seq;
      q.info.source_ts = msg.source_ts;
      q.info.intra_process = false;
      sub->enqueue(std::move(q));
    }
    sub->lifespan_drops_ += out.lifespan_expired;
    if (out.samples_lost > 0) {
      EndpointEvent ev;
      ev.kind = EndpointEventKind::SampleLost;
      ev.topic = sub->topic();
      ev.remote_endpoint = h.writer_guid;
      ev.count = out.samples_lost;
      sub->push_event(std::move(ev));
    }
    for (auto& pkt : out.to_send) send_packet(pkt, sub->guid());
    sub->writer_last_alive_[h.writer_guid] = now;
  }
}

void Context::handle_acknack(const PacketHeader& h, BytesView payload, MonoTime now) {
  auto pub = find_publisher(h.writer_guid);
  if (!pub) return;
  auto ack = transport::decode_acknack(payload);
  if (!ack.ok()) {
    ++decode_errors_;
    return;
  }
  auto retrans = pub->writer_.on_acknack(ack.value().reader_guid, ack.value(), now);
  for (auto& pkt : retrans) send_packet(pkt, pub->guid());
}

void Context::handle_heartbeat(const PacketHeader& h, BytesView payload, MonoTime now) {
  auto hb = transport::decode_heartbeat(payload);
  if (!hb.ok()) {
    ++decode_errors_;
    return;
  }
  for (auto& sub : subs_for_topic_id(h.topic_id)) {
    auto out = sub->reader_.on_heartbeat(h, hb.value(), now);
    for (auto& msg : out.messages) {
      Subscription::Queued q;
      q.bytes = std::move(msg.payload);
      q.info.writer = msg.writer;
      q.info.seq = msg.seq;
      q.info.source_ts = msg.source_ts;
      sub->enqueue(std::move(q));
    }
    sub->lifespan_drops_ += out.lifespan_expired;
    if (out.samples_lost > 0) {
      EndpointEvent ev;
      ev.kind = EndpointEventKind::SampleLost;
      ev.topic = sub->topic();
      ev.remote_endpoint = h.writer_guid;
      ev.count = out.samples_lost;
      sub->push_event(std::move(ev));
    }
    for (auto& pkt : out.to_send) send_packet(pkt, sub->guid());
    sub->writer_last_alive_[h.writer_guid] = now;
  }
}

// ------------------------------------------------------------- discovery --

void Context::handle_discovery(const PacketHeader& h, BytesView payload, Locator from,
                               MonoTime now) {
  if (payload.empty()) return;
  uint8_t subtype = payload[0];
  BytesView body = payload.subspan(1);

  if (subtype == discovery::kDiscoveryAnnouncement) {
    auto ann = discovery::decode_announcement(body);
    if (!ann.ok()) {
      ++decode_errors_;
      return;
    }
    if (ann.value().participant_guid == guid_) return;  // own reflection
    // Secured and unsecured participants never interoperate.
    if (ann.value().secured != (security_ != nullptr)) {
      ++unsecured_rejected_;
      return;
    }
    peer_locators_[ann.value().participant_guid] = from;
    learned_peers_.insert(from);
    if (security_) {
      process_secured_announcement(std::move(ann.value()), from, now);
    } else {
      ingest_announcement(ann.value(), now);
    }
    return;
  }

  if (!security_) return;  // handshake traffic is meaningless unsecured

  if (subtype == discovery::kDiscoveryHandshakeInit) {
    auto reply = security_->on_handshake_init(body, wall_now_ns());
    if (!reply.ok()) return;
    ByteWriter w(reply.value().size() + 1);
    w.u8(discovery::kDiscoveryHandshakeReply);
    w.raw(reply.value());
    PacketHeader out;
    out.kind = PacketKind::Discovery;
    out.writer_guid = guid_;
    out.payload_len = static_cast<uint16_t>(w.size());
    auto pkt = transport::encode_packet(out, BytesView(w.data()));
    if (pkt.ok()) link_->send(from, pkt.value());
    // The initiator's session is ready on our side; flush their buffered
    // announcement into the graph.
    auto pending = pending_secured_.find(h.writer_guid.participant());
    if (pending != pending_secured_.end() &&
        security_->session_ready(pending->first)) {
      ingest_announcement(pending->second.ann, now);
      pending_secured_.erase(pending);
      announce_dirty_ = true;  // make sure the peer hears us promptly
    }
  } else if (subtype == discovery::kDiscoveryHandshakeReply) {
    if (!security_->on_handshake_reply(body, wall_now_ns()).ok()) return;
    auto pending = pending_secured_.find(h.writer_guid.participant());
    if (pending != pending_secured_.end() &&
        security_->session_ready(pending->first)) {
      ingest_announcement(pending->second.ann, now);
      pending_secured_.erase(pending);
      announce_dirty_ = true;
    }
  }
}

void Context::process_secured_announcement(discovery::ParticipantAnnouncement ann, Locator from,
                                           MonoTime now) {
  auto body = discovery::encode_announcement_body(ann);
  auto peer = security_->verify_announcement(body, ann.identity_cert, ann.permissions,
                                             ann.signature, wall_now_ns());
  if (!peer.ok()) return;  // invalid identity: the participant does not exist for us
  peer_permissions_[ann.participant_guid] = peer.value().permissions;

  if (security_->session_ready(ann.participant_guid)) {
    ingest_announcement(ann, now);
    return;
  }
  Guid guid = ann.participant_guid;
  pending_secured_[guid] = {std::move(ann), from};
  if (security_->should_initiate(guid)) {
    auto hs = security_->start_handshake(guid);
    if (!hs.ok()) return;
    ByteWriter w(hs.value().size() + 1);
    w.u8(discovery::kDiscoveryHandshakeInit);
    w.raw(hs.value());
    PacketHeader out;
    out.kind = PacketKind::Discovery;
    out.writer_guid = guid_;
    out.payload_len = static_cast<uint16_t>(w.size());
    auto pkt = transport::encode_packet(out, BytesView(w.data()));
    if (pkt.ok()) link_->send(from, pkt.value());
  }
}

bool Context::endpoint_authorized(const Guid& participant,
                                  const discovery::EndpointInfo& ep) const {
  if (!security_) return true;
  using security::RuleDirection;
  std::optional<RuleDirection> dir;
  if (ep.direction == EndpointDirection::Publisher) dir = RuleDirection::Pub;
  if (ep.direction == EndpointDirection::Subscription) dir = RuleDirection::Sub;
  if (!dir) return true;  // service markers are introspection only

  const security::PermissionsDocument* doc = nullptr;
  if (participant == guid_) {
    doc = &security_->identity().permissions;
  } else {
    auto it = peer_permissions_.find(participant);
    if (it == peer_permissions_.end()) return false;
    doc = &it->second;
  }
  return security::authorize(*doc, *dir, ep.topic_name);
}

discovery::ParticipantAnnouncement Context::build_announcement() {
  discovery::ParticipantAnnouncement ann;
  ann.participant_guid = guid_;
  Locator loc = link_->local();
  ann.address = loc.ip;
  ann.port = loc.port;
  ann.lease_duration = cfg_.lease_duration;
  ann.announcement_seq = announce_seq_;
  ann.secured = security_ != nullptr;
  for (const auto& [fqn, node] : nodes_) ann.nodes.push_back(fqn);
  for (const auto& [guid, pub] : publishers_) {
    if (pub->destroyed_) continue;
    discovery::EndpointInfo e;
    e.direction = EndpointDirection::Publisher;
    e.topic_name = pub->topic();
    e.type_name = pub->type_name_;
    e.type_hash = pub->type_hash();
    e.qos = pub->qos();
    e.endpoint_guid = guid;
    e.owning_node = pub->node_ ? pub->node_->fqn() : "";
    ann.endpoints.push_back(std::move(e));
  }
  for (const auto& [guid, sub] : subscriptions_) {
    if (sub->destroyed_) continue;
    discovery::EndpointInfo e;
    e.direction = EndpointDirection::Subscription;
    e.topic_name = sub->topic();
    e.type_name = sub->type_name_;
    e.type_hash = sub->type_hash();
    e.qos = sub->qos();
    e.endpoint_guid = guid;
    e.owning_node = sub->node_ ? sub->node_->fqn() : "";
    ann.endpoints.push_back(std::move(e));
  }
  for (const auto& [guid, marker] : endpoint_markers_) ann.endpoints.push_back(marker);
  return ann;
}

void Context::register_endpoint_marker(discovery::EndpointInfo info) {
  endpoint_markers_[info.endpoint_guid] = std::move(info);
  announce_dirty_ = true;
}

void Context::unregister_endpoint_marker(const Guid& guid) {
  endpoint_markers_.erase(guid);
  announce_dirty_ = true;
}

void Context::announce(MonoTime now) {
  ++announce_seq_;
  auto ann = build_announcement();

  // The graph includes ourselves: local pairs match through the same path.
  ingest_announcement(ann, now);

  Bytes body = discovery::encode_announcement_body(ann);
  if (security_) {
    security_->sign_announcement(body, ann.identity_cert, ann.permissions, ann.signature);
  }
  Bytes encoded = discovery::encode_announcement(ann);
  ByteWriter w(encoded.size() + 1);
  w.u8(discovery::kDiscoveryAnnouncement);
  w.raw(encoded);

  PacketHeader h;
  h.kind = PacketKind::Discovery;
  h.writer_guid = guid_;
  h.seq = announce_seq_;
  if (w.size() > 0xFFFF) return;  // announcement too large to ship
  h.payload_len = static_cast<uint16_t>(w.size());
  auto pkt = transport::encode_packet(h, BytesView(w.data()));
  if (!pkt.ok()) return;

  if (cfg_.multicast && link_->multicast_available()) link_->send_multicast(pkt.value());
  std::set<Locator> targets(static_peers_.begin(), static_peers_.end());
  targets.insert(learned_peers_.begin(), learned_peers_.end());
  for (const auto& [guid, loc] : peer_locators_) targets.insert(loc);
  targets.erase(link_->local());
  for (const auto& target : targets) link_->send(target, pkt.value());

  last_announce_ = now;
  announce_dirty_ = false;
}

void Context::ingest_announcement(const discovery::ParticipantAnnouncement& ann, MonoTime now) {
  apply_graph_events(graph_.process_announcement(ann, now), now);
}

void Context::apply_graph_events(const std::vector<GraphEvent>& events, MonoTime now) {
  for (const auto& ev : events) {
    switch (ev.kind) {
      case GraphEventKind::Matched: {
        auto pub = find_publisher(ev.writer);
        auto sub_it = subscriptions_.find(ev.reader);
        auto sub = sub_it == subscriptions_.end() ? nullptr : sub_it->second;

        if (pub && sub) {
          // Same participant: delivery stays in-process (values when the
          // intra-process path is on, serialized bytes otherwise).
          pub->local_subs_.push_back(sub);
          if (pub->qos().durability == transport::Durability::TransientLocal &&
              sub->qos().durability == transport::Durability::TransientLocal) {
            for (auto& r : pub->retained_) {
              Subscription::Queued q;
              if (cfg_.intra_process && r.value) {
                q.value = r.value;
                q.info.intra_process = true;
              } else {
                q.bytes = pub->retained_bytes(r);
              }
              q.info.writer = pub->guid();
              q.info.seq = r.seq;
              q.info.source_ts = r.source_ts;
              sub->enqueue(std::move(q));
            }
          }
        } else {
          if (pub) {
            const auto* rep = graph_.endpoint(ev.reader);
            if (rep) {
              if (pub->qos().durability == transport::Durability::TransientLocal &&
                  rep->qos.durability == transport::Durability::TransientLocal) {
                for (auto& r : pub->retained_)
                  pub->writer_.restore_sample(r.seq, pub->retained_bytes(r), r.source_ts);
              }
              for (auto& pkt : pub->writer_.add_reader(ev.reader, rep->qos, now))
                send_packet(pkt, pub->guid());
            }
          }
          if (sub) sub->reader_.add_writer(ev.writer, now);
        }
        auto notify = [&ev](EndpointEventKind kind, auto& endpoint, const Guid& remote) {
          EndpointEvent e;
          e.kind = kind;
          e.topic = ev.topic;
          e.remote_endpoint = remote;
          endpoint->push_event(std::move(e));
        };
        if (pub) notify(EndpointEventKind::Matched, pub, ev.reader);
        if (sub) notify(EndpointEventKind::Matched, sub, ev.writer);
        break;
      }
      case GraphEventKind::Unmatched: {
        auto pub = find_publisher(ev.writer);
        auto sub_it = subscriptions_.find(ev.reader);
        auto sub = sub_it == subscriptions_.end() ? nullptr : sub_it->second;
        if (pub) {
          pub->writer_.remove_reader(ev.reader);
          std::erase_if(pub->local_subs_, [&](const std::weak_ptr<Subscription>& w) {
            auto s = w.lock();
            return !s || s->guid() == ev.reader;
          });
          EndpointEvent e;
          e.kind = EndpointEventKind::Unmatched;
          e.topic = ev.topic;
          e.remote_endpoint = ev.reader;
          pub->push_event(std::move(e));
        }
        if (sub) {
          sub->reader_.remove_writer(ev.writer);
          sub->writer_last_alive_.erase(ev.writer);
          sub->writer_alive_.erase(ev.writer);
          EndpointEvent e;
          e.kind = EndpointEventKind::Unmatched;
          e.topic = ev.topic;
          e.remote_endpoint = ev.writer;
          sub->push_event(std::move(e));
        }
        break;
      }
      case GraphEventKind::IncompatibleQos:
      case GraphEventKind::TypeMismatch: {
        EndpointEventKind kind = ev.kind == GraphEventKind::IncompatibleQos
                                     ? EndpointEventKind::IncompatibleQos
                                     : EndpointEventKind::TypeMismatch;
        if (auto pub = find_publisher(ev.writer)) {
          EndpointEvent e;
          e.kind = kind;
          e.topic = ev.topic;
          e.remote_endpoint = ev.reader;
          e.qos_reasons = ev.reasons;
          pub->push_event(std::move(e));
        }
        if (auto sub_it = subscriptions_.find(ev.reader); sub_it != subscriptions_.end()) {
          EndpointEvent e;
          e.kind = kind;
          e.topic = ev.topic;
          e.remote_endpoint = ev.writer;
          e.qos_reasons = ev.reasons;
          sub_it->second->push_event(std::move(e));
        }
        break;
      }
      case GraphEventKind::ParticipantLost: {
        peer_locators_.erase(ev.participant);
        pending_secured_.erase(ev.participant);
        peer_permissions_.erase(ev.participant);
        break;
      }
      case GraphEventKind::ParticipantDiscovered:
        // A fresh peer should hear our snapshot promptly.
        if (!(ev.participant == guid_)) announce_dirty_ = true;
        break;
    }
  }
}

// -------------------------------------------------------------- outbound --

std::optional<Locator> Context::locator_of(const Guid& participant) const {
  auto it = peer_locators_.find(participant);
  if (it != peer_locators_.end()) return it->second;
  const auto* ann = graph_.participant(participant);
  if (ann) return Locator{ann->address, ann->port};
  return std::nullopt;
}

void Context::send_datagram_to_participant(const Guid& participant, const PacketHeader& h,
                                           BytesView payload) {
  auto loc = participant == guid_ ? std::optional<Locator>(link_->local())
                                  : locator_of(participant);
  if (!loc) return;
  if (security_ && !(participant == guid_)) {
    auto sealed = security_->seal_datagram(participant, h, payload);
    if (!sealed.ok()) return;  // no session yet: reliable traffic recovers later
    link_->send(*loc, sealed.value());
    return;
  }
  PacketHeader out = h;
  out.payload_len = static_cast<uint16_t>(payload.size());
  auto pkt = transport::encode_packet(out, payload);
  if (pkt.ok()) link_->send(*loc, pkt.value());
}

void Context::send_packet(const transport::OutboundPacket& packet, const Guid& writer_guid) {
  if (packet.to) {
    send_datagram_to_participant(packet.to->participant(), packet.header, packet.payload);
    return;
  }
  // fan out once per participant holding matched readers
  auto pub = find_publisher(writer_guid);
  if (!pub) return;
  std::set<Guid> participants;
  for (const auto& reader : pub->writer_.reader_guids())
    participants.insert(reader.participant());
  for (const auto& participant : participants)
    send_datagram_to_participant(participant, packet.header, packet.payload);
}

void Context::send_data_packets(std::vector<transport::OutboundPacket>& packets, size_t begin,
                                size_t end, const Guid& writer_guid) {
  auto pub = find_publisher(writer_guid);
  if (!pub) return;
  if (security_) {
    for (size_t i = begin; i < end; ++i) send_packet(packets[i], writer_guid);
    return;
  }
  // Broadcast fragments ride one batched syscall per destination; targeted
  // packets (piggyback heartbeats) go the ordinary route.
  std::vector<Bytes> headers;
  std::vector<DatagramLink::Frame> frames;
  headers.reserve(end - begin);
  frames.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    transport::OutboundPacket& p = packets[i];
    if (p.to) {
      send_packet(p, writer_guid);
      continue;
    }
    p.header.payload_len = static_cast<uint16_t>(p.payload.size());
    headers.push_back(transport::encode_header(p.header));
    frames.emplace_back(BytesView(headers.back()), BytesView(p.payload));
  }
  if (frames.empty()) return;
  std::set<Guid> participants;
  for (const auto& reader : pub->writer_.reader_guids())
    participants.insert(reader.participant());
  for (const auto& participant : participants) {
    auto loc = participant == guid_ ? std::optional<Locator>(link_->local())
                                    : locator_of(participant);
    if (loc) link_->send_batch(*loc, frames);
  }
}

// ----------------------------------------------------------- registration --

Status Context::register_publisher(std::shared_ptr<Publisher> pub) {
  publishers_[pub->guid()] = std::move(pub);
  announce_dirty_ = true;
  return {};
}

Status Context::register_subscription(std::shared_ptr<Subscription> sub) {
  subs_by_topic_id_.emplace(
      interfaces::compute_topic_id(sub->topic(), sub->type_hash()), sub->guid());
  subscriptions_[sub->guid()] = std::move(sub);
  announce_dirty_ = true;
  return {};
}

void Context::unregister_endpoint(const Guid& guid) {
  publishers_.erase(guid);
  auto sub = subscriptions_.find(guid);
  if (sub != subscriptions_.end()) {
    for (auto it = subs_by_topic_id_.begin(); it != subs_by_topic_id_.end();) {
      if (it->second == guid) {
        it = subs_by_topic_id_.erase(it);
      } else {
        ++it;
      }
    }
    subscriptions_.erase(sub);
  }
  announce_dirty_ = true;
}

Status Context::register_node(const std::shared_ptr<Node>& node) {
  // Fully-qualified names must be unique across the graph, not just locally.
  for (const auto& name : graph_.node_names())
    if (name == node->fqn())
      return Error{Errc::name_conflict, "node name '" + node->fqn() + "' already in graph"};
  if (nodes_.count(node->fqn()))
    return Error{Errc::name_conflict, "node name '" + node->fqn() + "' already in graph"};
  nodes_[node->fqn()] = node;
  announce_dirty_ = true;
  return {};
}

void Context::unregister_node(const std::string& fqn) {
  nodes_.erase(fqn);
  announce_dirty_ = true;
}

Result<std::shared_ptr<Node>> Context::create_node(const std::string& name,
                                                   const std::string& ns) {
  auto node = std::shared_ptr<Node>(new Node(*this, name, ns));
  if (node->fqn().empty())
    return Error{Errc::validation_error, "invalid node name '" + name + "' in '" + ns + "'"};
  if (auto st = register_node(node); !st.ok()) return st.error();
  install_node_builtins(*node);
  return node;
}

std::shared_ptr<Publisher> Context::find_publisher(const Guid& guid) {
  auto it = publishers_.find(guid);
  return it == publishers_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<Subscription>> Context::subs_for_topic_id(uint64_t topic_id) {
  std::vector<std::shared_ptr<Subscription>> out;
  auto [lo, hi] = subs_by_topic_id_.equal_range(topic_id);
  for (auto it = lo; it != hi; ++it) {
    auto sub = subscriptions_.find(it->second);
    if (sub != subscriptions_.end()) out.push_back(sub->second);
  }
  return out;
}

// ---------------------------------------------------------------- upkeep --

void Context::upkeep(MonoTime now) {
  if (announce_dirty_ || last_announce_ == MonoTime{} ||
      now - last_announce_ >= cfg_.announce_period)
    announce(now);

  apply_graph_events(graph_.expire_stale(now), now);

  for (auto& [guid, pub] : publishers_)
    for (auto& pkt : pub->writer_.heartbeat_tick(now)) send_packet(pkt, guid);

  if (now - last_reassembly_prune_ >= std::chrono::milliseconds(500)) {
    for (auto& [guid, sub] : subscriptions_) sub->reader_.prune_reassembly(now);
    last_reassembly_prune_ = now;
  }

  for (auto& [guid, sub] : subscriptions_) {
    // deadline: maximum tolerated gap between deliveries
    if (sub->qos().deadline && sub->deadline_base_ != MonoTime{} &&
        sub->matched_count() > 0) {
      while (now - sub->deadline_base_ > *sub->qos().deadline) {
        sub->deadline_base_ += *sub->qos().deadline;
        EndpointEvent e;
        e.kind = EndpointEventKind::DeadlineMissed;
        e.topic = sub->topic();
        sub->push_event(std::move(e));
      }
    }
    // manual liveliness: lease expiry per matched writer
    if (sub->qos().liveliness == transport::Liveliness::Manual && sub->qos().lease_duration) {
      for (auto& [writer, last] : sub->writer_last_alive_) {
        bool alive = now - last <= *sub->qos().lease_duration;
        auto it = sub->writer_alive_.find(writer);
        bool was_alive = it == sub->writer_alive_.end() ? true : it->second;
        if (alive != was_alive) {
          sub->writer_alive_[writer] = alive;
          EndpointEvent e;
          e.kind = EndpointEventKind::LivelinessChanged;
          e.topic = sub->topic();
          e.remote_endpoint = writer;
          e.alive = alive;
          sub->push_event(std::move(e));
        }
      }
    }
  }

  earliest_sweep_due_.reset();
  for (auto it = sweeps_.begin(); it != sweeps_.end();) {
    auto target = it->lock();
    if (!target) {
      it = sweeps_.erase(it);
      continue;
    }
    auto due = target->sweep(now);
    if (due && (!earliest_sweep_due_ || *due < *earliest_sweep_due_))
      earliest_sweep_due_ = due;
    ++it;
  }
}

size_t Context::run_ready(MonoTime now) {
  size_t executed = 0;

  for (auto& timer : timers_) {
    if (timer->canceled() || timer->next_fire_ > now) continue;
    bool gated = timer->node_ && timer->node_->managed() &&
                 timer->node_->lifecycle_state() != mgmt::LifecycleState::Active;
    timer->next_fire_ += timer->period_;
    if (timer->next_fire_ <= now) timer->next_fire_ = now + timer->period_;  // skip misses
    if (gated) continue;
    ++timer->fire_count_;
    run_guarded(timer->callback_);
    ++executed;
  }
  std::erase_if(timers_, [](const auto& t) { return t->canceled(); });

  size_t batch = ready_.size();  // snapshot: items posted by callbacks wait a pass
  for (size_t i = 0; i < batch; ++i) {
    WorkItem item = std::move(ready_.front());
    ready_.pop_front();
    bool ran = false;
    try {
      ran = item.run();
    } catch (const std::exception&) {
      ++callback_errors_;
      ran = true;
    }
    if (ran) ++executed;
  }
  return executed;
}

void Context::run_guarded(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception&) {
    ++callback_errors_;  // contained: the executor continues
  }
}

std::optional<MonoTime> Context::next_wakeup() {
  std::optional<MonoTime> next;
  auto consider = [&next](std::optional<MonoTime> t) {
    if (t && (!next || *t < *next)) next = t;
  };
  {
    std::lock_guard<std::mutex> lock(inbound_mu_);
    if (!inbound_.empty()) consider(inbound_.top().at);
  }
  if (!ready_.empty()) return clock_->now();
  for (const auto& timer : timers_) {
    if (timer->canceled()) continue;
    bool gated = timer->node_ && timer->node_->managed() &&
                 timer->node_->lifecycle_state() != mgmt::LifecycleState::Active;
    if (!gated) consider(timer->next_fire_);
  }
  if (announce_dirty_ || last_announce_ == MonoTime{}) return clock_->now();
  consider(last_announce_ + cfg_.announce_period);
  MonoTime now = clock_->now();
  for (const auto& [guid, pub] : publishers_) consider(pub->writer_.next_heartbeat_due(now));
  (void)now;
  consider(graph_.next_expiry());
  consider(last_reassembly_prune_ + std::chrono::milliseconds(500));
  for (const auto& [guid, sub] : subscriptions_)
    if (sub->qos().deadline && sub->deadline_base_ != MonoTime{})
      consider(sub->deadline_base_ + *sub->qos().deadline);
  consider(earliest_sweep_due_);
  return next;
}

size_t Context::spin_once(Duration max_wait) {
  MonoTime deadline = clock_->now() + max_wait;
  for (;;) {
    MonoTime now = clock_->now();
    pump_inbound(now);
    upkeep(now);
    size_t executed = run_ready(now);
    if (executed > 0 || max_wait <= Duration::zero() || shutdown_.load() || sim_time_)
      return executed;

    auto wake = next_wakeup();
    MonoTime until = deadline;
    if (wake && *wake < until) until = *wake;
    now = clock_->now();
    if (until > now) {
      std::unique_lock<std::mutex> lock(inbound_mu_);
      if (inbound_.empty() || inbound_.top().at > now)
        inbound_cv_.wait_until(lock, until);
    }
    if (clock_->now() >= deadline) {
      now = clock_->now();
      pump_inbound(now);
      upkeep(now);
      return run_ready(now);
    }
  }
}

bool spin_until(Context& ctx, const std::function<bool()>& pred, Duration timeout) {
  MonoTime deadline = ctx.clock().now() + timeout;
  while (!pred()) {
    if (ctx.clock().now() >= deadline) return pred();
    ctx.spin_once(std::chrono::milliseconds(5));
  }
  return true;
}

}  // namespace mbus::core
