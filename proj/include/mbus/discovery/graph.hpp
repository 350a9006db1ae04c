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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mbus/discovery/announcement.hpp"
#include "mbus/discovery/qos_matching.hpp"

namespace mbus::discovery {

enum class GraphEventKind : uint8_t {
  ParticipantDiscovered,
  ParticipantLost,
  Matched,        // (writer, reader) became compatible
  Unmatched,      // previously matched pair separated
  TypeMismatch,   // same topic, different type hash
  IncompatibleQos,
};

struct GraphEvent {
  GraphEventKind kind{};
  Guid participant{};          // participant events
  Guid writer{};               // pair events
  Guid reader{};
  std::string topic;
  std::vector<QosPolicy> reasons;  // IncompatibleQos only
};

/// Distributed graph bookkeeping: every participant runs one of these over
/// the announcements it hears (including its own) and arrives at the same
/// matched-pair set. Mutated only by its owning participant context.
class GraphView {
 public:
  /// Applies one announcement. Stale sequences are ignored; re-announcing an
  /// identical snapshot is a lease refresh and emits nothing. Match state
  /// changes emit events exactly once per pair transition, ordered by guid.
  std::vector<GraphEvent> process_announcement(const ParticipantAnnouncement& ann, MonoTime now);

  /// Removes participants silent past their lease; their endpoints unmatch.
  /// Events are emitted deterministically (participants ordered by guid).
  std::vector<GraphEvent> expire_stale(MonoTime now);

  /// Earliest instant at which some participant's lease can expire.
  std::optional<MonoTime> next_expiry() const;

  bool matched(const Guid& writer, const Guid& reader) const {
    return matches_.count({writer, reader}) != 0;
  }
  std::vector<Guid> matched_readers(const Guid& writer) const;
  std::vector<Guid> matched_writers(const Guid& reader) const;

  const ParticipantAnnouncement* participant(const Guid& guid) const;
  const ParticipantAnnouncement* participant_of(const Guid& endpoint) const;
  const EndpointInfo* endpoint(const Guid& endpoint_guid) const;

  std::vector<std::string> node_names() const;
  std::vector<std::string> topic_names() const;
  std::vector<EndpointInfo> endpoints_on_topic(const std::string& topic) const;
  std::vector<const ParticipantAnnouncement*> participants() const;
  size_t participant_count() const { return participants_.size(); }

  /// Pre-match authorization hook (security): endpoints rejected by it are
  /// invisible to matching.
  using EndpointFilter = std::function<bool(const Guid& participant, const EndpointInfo&)>;
  void set_endpoint_filter(EndpointFilter filter) { filter_ = std::move(filter); }

 private:
  enum class PairState : uint8_t { None, Matched, TypeMismatch, IncompatibleQos };
  struct Record {
    ParticipantAnnouncement ann;
    MonoTime last_heard{};
  };

  std::vector<GraphEvent> recompute_pairs(MonoTime now);
  void drop_participant(const Guid& guid, std::vector<GraphEvent>& events);

  std::map<Guid, Record> participants_;
  std::map<std::pair<Guid, Guid>, PairState> pair_states_;
  std::set<std::pair<Guid, Guid>> matches_;
  EndpointFilter filter_;
};

}  // namespace mbus::discovery
