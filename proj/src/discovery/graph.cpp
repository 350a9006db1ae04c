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

#include "mbus/discovery/graph.hpp"

#include <algorithm>

namespace mbus::discovery {

std::vector<GraphEvent> GraphView::process_announcement(const ParticipantAnnouncement& ann,
                                                        MonoTime now) {
  std::vector<GraphEvent> events;
  auto it = participants_.find(ann.participant_guid);
  if (it != participants_.end()) {
    if (ann.announcement_seq < it->second.ann.announcement_seq) return events;  // stale
    bool unchanged = ann.announcement_seq == it->second.ann.announcement_seq;
    it->second.last_heard = now;  // lease refresh either way
    if (unchanged) return events;
    it->second.ann = ann;
  } else {
    participants_.emplace(ann.participant_guid, Record{ann, now});
    GraphEvent e;
    e.kind = GraphEventKind::ParticipantDiscovered;
    e.participant = ann.participant_guid;
    events.push_back(e);
  }
  auto pair_events = recompute_pairs(now);
  events.insert(events.end(), pair_events.begin(), pair_events.end());
  return events;
}

std::vector<GraphEvent> GraphView::recompute_pairs(MonoTime now) {
  (void)now;
  // Desired state over every (publisher, subscription) pair on equal topics.
  std::map<std::pair<Guid, Guid>, PairState> next;
  std::map<std::pair<Guid, Guid>, std::vector<QosPolicy>> reasons;
  std::map<std::pair<Guid, Guid>, std::string> topics;

  for (const auto& [wg, wrec] : participants_) {
    for (const auto& pub : wrec.ann.endpoints) {
      if (pub.direction != EndpointDirection::Publisher) continue;
      if (filter_ && !filter_(wg, pub)) continue;
      for (const auto& [rg, rrec] : participants_) {
        for (const auto& sub : rrec.ann.endpoints) {
          if (sub.direction != EndpointDirection::Subscription) continue;
          if (sub.topic_name != pub.topic_name) continue;
          if (filter_ && !filter_(rg, sub)) continue;
          auto key = std::make_pair(pub.endpoint_guid, sub.endpoint_guid);
          topics[key] = pub.topic_name;
          if (pub.type_hash != sub.type_hash) {
            next[key] = PairState::TypeMismatch;
            continue;
          }
          auto compat = qos_compatible(pub.qos, sub.qos);
          if (compat.compatible) {
            next[key] = PairState::Matched;
          } else {
            next[key] = PairState::IncompatibleQos;
            reasons[key] = compat.reasons;
          }
        }
      }
    }
  }

  std::vector<GraphEvent> events;
  auto emit = [&](GraphEventKind kind, const std::pair<Guid, Guid>& key) {
    GraphEvent e;
    e.kind = kind;
    e.writer = key.first;
    e.reader = key.second;
    auto t = topics.find(key);
    if (t != topics.end()) e.topic = t->second;
    if (kind == GraphEventKind::IncompatibleQos) e.reasons = reasons[key];
    events.push_back(std::move(e));
  };

  // Pairs that vanished or changed state (map iteration: ordered by guid).
  for (const auto& [key, old_state] : pair_states_) {
    auto nit = next.find(key);
    PairState new_state = nit == next.end() ? PairState::None : nit->second;
    if (new_state == old_state) continue;
    if (old_state == PairState::Matched) {
      matches_.erase(key);
      // Carry the topic for vanished pairs from the old record if needed.
      if (topics.find(key) == topics.end()) {
        const auto* ep = endpoint(key.first);
        if (ep) topics[key] = ep->topic_name;
      }
      emit(GraphEventKind::Unmatched, key);
    }
  }
  for (const auto& [key, new_state] : next) {
    auto oit = pair_states_.find(key);
    PairState old_state = oit == pair_states_.end() ? PairState::None : oit->second;
    if (new_state == old_state) continue;
    switch (new_state) {
      case PairState::Matched:
        matches_.insert(key);
        emit(GraphEventKind::Matched, key);
        break;
      case PairState::TypeMismatch:
        emit(GraphEventKind::TypeMismatch, key);
        break;
      case PairState::IncompatibleQos:
        emit(GraphEventKind::IncompatibleQos, key);
        break;
      case PairState::None:
        break;
    }
  }
  pair_states_ = std::move(next);
  return events;
}

void GraphView::drop_participant(const Guid& guid, std::vector<GraphEvent>& events) {
  participants_.erase(guid);
  GraphEvent e;
  e.kind = GraphEventKind::ParticipantLost;
  e.participant = guid;
  events.push_back(e);
}

std::vector<GraphEvent> GraphView::expire_stale(MonoTime now) {
  std::vector<GraphEvent> events;
  std::vector<Guid> stale;  // map order: deterministic by guid
  for (const auto& [guid, rec] : participants_)
    if (now - rec.last_heard > rec.ann.lease_duration) stale.push_back(guid);
  if (stale.empty()) return events;
  for (const auto& guid : stale) drop_participant(guid, events);
  auto pair_events = recompute_pairs(now);
  events.insert(events.end(), pair_events.begin(), pair_events.end());
  return events;
}

std::optional<MonoTime> GraphView::next_expiry() const {
  std::optional<MonoTime> t;
  for (const auto& [guid, rec] : participants_) {
    MonoTime e = rec.last_heard + rec.ann.lease_duration;
    if (!t || e < *t) t = e;
  }
  return t;
}

std::vector<Guid> GraphView::matched_readers(const Guid& writer) const {
  std::vector<Guid> out;
  for (const auto& [w, r] : matches_)
    if (w == writer) out.push_back(r);
  return out;
}

std::vector<Guid> GraphView::matched_writers(const Guid& reader) const {
  std::vector<Guid> out;
  for (const auto& [w, r] : matches_)
    if (r == reader) out.push_back(w);
  return out;
}

const ParticipantAnnouncement* GraphView::participant(const Guid& guid) const {
  auto it = participants_.find(guid);
  return it == participants_.end() ? nullptr : &it->second.ann;
}

const ParticipantAnnouncement* GraphView::participant_of(const Guid& endpoint) const {
  return participant(endpoint.participant());
}

const EndpointInfo* GraphView::endpoint(const Guid& endpoint_guid) const {
  const auto* ann = participant_of(endpoint_guid);
  if (!ann) return nullptr;
  for (const auto& e : ann->endpoints)
    if (e.endpoint_guid == endpoint_guid) return &e;
  return nullptr;
}

std::vector<std::string> GraphView::node_names() const {
  std::vector<std::string> names;
  for (const auto& [guid, rec] : participants_)
    names.insert(names.end(), rec.ann.nodes.begin(), rec.ann.nodes.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::vector<std::string> GraphView::topic_names() const {
  std::vector<std::string> names;
  for (const auto& [guid, rec] : participants_)
    for (const auto& e : rec.ann.endpoints)
      if (e.direction == EndpointDirection::Publisher ||
          e.direction == EndpointDirection::Subscription)
        names.push_back(e.topic_name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::vector<EndpointInfo> GraphView::endpoints_on_topic(const std::string& topic) const {
  std::vector<EndpointInfo> out;
  for (const auto& [guid, rec] : participants_)
    for (const auto& e : rec.ann.endpoints)
      if (e.topic_name == topic) out.push_back(e);
  return out;
}

std::vector<const ParticipantAnnouncement*> GraphView::participants() const {
  std::vector<const ParticipantAnnouncement*> out;
  out.reserve(participants_.size());
  for (const auto& [guid, rec] : participants_) out.push_back(&rec.ann);
  return out;
}

}  // namespace mbus::discovery
