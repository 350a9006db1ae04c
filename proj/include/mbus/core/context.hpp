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

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>

#include "mbus/core/config.hpp"
#include "mbus/core/link.hpp"
#include "mbus/core/node.hpp"
#include "mbus/core/work.hpp"
#include "mbus/discovery/graph.hpp"
#include "mbus/security/session.hpp"

namespace mbus::core {

/// One participant: a GUID, a datagram link, discovery state, and the nodes
/// built on top. All protocol state is owned by the spinning context; the
/// link's receive thread only enqueues raw datagrams.
class Context : public std::enable_shared_from_this<Context> {
 public:
  /// Real UDP participant.
  static Result<std::shared_ptr<Context>> create(const ContextConfig& cfg);

  /// Participant on an injected link/clock (the simulated network uses this).
  static Result<std::shared_ptr<Context>> create_with_link(const ContextConfig& cfg,
                                                           std::unique_ptr<DatagramLink> link,
                                                           std::shared_ptr<Clock> clock);

  ~Context();

  Result<std::shared_ptr<Node>> create_node(const std::string& name,
                                            const std::string& ns = "/");

  /// Processes due inbound datagrams, runs protocol upkeep, executes ready
  /// work. Returns the number of items executed; waits up to max_wait when
  /// nothing is ready (never waits when max_wait is zero).
  size_t spin_once(Duration max_wait);

  void shutdown();
  bool shutdown_requested() const { return shutdown_.load(); }

  const Guid& participant_guid() const { return guid_; }
  const ContextConfig& config() const { return cfg_; }
  Clock& clock() { return *clock_; }
  const discovery::GraphView& graph() const { return graph_; }
  Locator local_locator() const { return link_->local(); }

  /// Earliest instant any timer, inbound datagram or protocol duty comes due.
  /// Simulation drivers advance their clock to this.
  std::optional<MonoTime> next_wakeup();

  // --- instrumentation ---
  uint64_t serialization_count() const { return serializations_.load(); }
  uint64_t auth_failure_count() const;
  uint64_t replay_drop_count() const;
  uint64_t foreign_packets() const { return foreign_packets_; }
  uint64_t datagrams_received() const { return datagrams_received_; }
  uint64_t callback_errors() const { return callback_errors_; }

  // --- internal surface (rpc, mgmt, tooling build on these) ---
  void post_work(WorkKind kind, std::function<bool()> run);
  void register_sweep(std::weak_ptr<Sweepable> target);
  Guid next_endpoint_guid();
  uint64_t bump_serializations() { return ++serializations_; }
  void mark_announcement_dirty();
  security::SecurityEngine* security_engine() { return security_.get(); }

  /// Introspection-only endpoint rows (service servers/clients) included in
  /// announcements alongside the real pub/sub endpoints.
  void register_endpoint_marker(discovery::EndpointInfo info);
  void unregister_endpoint_marker(const Guid& guid);

 private:
  friend class Publisher;
  friend class Subscription;
  friend class Node;

  explicit Context(ContextConfig cfg);
  Status init(std::unique_ptr<DatagramLink> link, std::shared_ptr<Clock> clock);

  // inbound path (link thread -> queue -> owner)
  void on_link_datagram(Bytes datagram, Locator from);
  void pump_inbound(MonoTime now);
  void handle_datagram(BytesView datagram, Locator from, MonoTime now);
  void handle_discovery(const transport::PacketHeader& h, BytesView payload, Locator from,
                        MonoTime now);
  void handle_data(const transport::PacketHeader& h, BytesView payload, MonoTime now);
  void handle_acknack(const transport::PacketHeader& h, BytesView payload, MonoTime now);
  void handle_heartbeat(const transport::PacketHeader& h, BytesView payload, MonoTime now);

  // outbound path
  void send_packet(const transport::OutboundPacket& packet, const Guid& writer_guid);
  void send_data_packets(std::vector<transport::OutboundPacket>& packets, size_t begin,
                         size_t end, const Guid& writer_guid);
  void send_datagram_to_participant(const Guid& participant, const transport::PacketHeader& h,
                                    BytesView payload);
  std::optional<Locator> locator_of(const Guid& participant) const;

  // discovery & security
  void announce(MonoTime now);
  discovery::ParticipantAnnouncement build_announcement();
  void ingest_announcement(const discovery::ParticipantAnnouncement& ann, MonoTime now);
  void apply_graph_events(const std::vector<discovery::GraphEvent>& events, MonoTime now);
  void process_secured_announcement(discovery::ParticipantAnnouncement ann, Locator from,
                                    MonoTime now);
  bool endpoint_authorized(const Guid& participant, const discovery::EndpointInfo& ep) const;

  // upkeep & execution
  void upkeep(MonoTime now);
  size_t run_ready(MonoTime now);
  void run_guarded(const std::function<void()>& fn);

  // registration from Node
  Status register_publisher(std::shared_ptr<Publisher> pub);
  Status register_subscription(std::shared_ptr<Subscription> sub);
  void unregister_endpoint(const Guid& guid);
  Status register_node(const std::shared_ptr<Node>& node);
  void unregister_node(const std::string& fqn);

  std::shared_ptr<Publisher> find_publisher(const Guid& guid);
  std::vector<std::shared_ptr<Subscription>> subs_for_topic_id(uint64_t topic_id);

  ContextConfig cfg_;
  std::shared_ptr<Clock> clock_;
  Guid guid_;
  std::atomic<uint32_t> next_entity_{1};
  std::unique_ptr<DatagramLink> link_;
  transport::Impairment inbound_impairment_;

  // inbound queue: (deliver_at, arrival_order) min-heap
  struct Inbound {
    MonoTime at;
    uint64_t order;
    Bytes data;
    Locator from;
    bool operator>(const Inbound& o) const {
      return at != o.at ? at > o.at : order > o.order;
    }
  };
  std::mutex inbound_mu_;
  std::condition_variable inbound_cv_;
  std::priority_queue<Inbound, std::vector<Inbound>, std::greater<>> inbound_;
  uint64_t inbound_order_ = 0;

  discovery::GraphView graph_;
  uint64_t announce_seq_ = 0;
  bool announce_dirty_ = true;
  MonoTime last_announce_{};
  std::vector<Locator> static_peers_;
  std::map<Guid, Locator> peer_locators_;
  std::set<Locator> learned_peers_;

  std::map<Guid, std::shared_ptr<Publisher>> publishers_;
  std::map<Guid, std::shared_ptr<Subscription>> subscriptions_;
  std::multimap<uint64_t, Guid> subs_by_topic_id_;
  std::map<std::string, std::shared_ptr<Node>> nodes_;
  std::vector<std::shared_ptr<Timer>> timers_;
  std::map<Guid, discovery::EndpointInfo> endpoint_markers_;

  std::unique_ptr<security::SecurityEngine> security_;
  struct PendingSecuredPeer {
    discovery::ParticipantAnnouncement ann;
    Locator from;
  };
  std::map<Guid, PendingSecuredPeer> pending_secured_;
  std::map<Guid, security::PermissionsDocument> peer_permissions_;

  struct WorkItem {
    WorkKind kind;
    std::function<bool()> run;
  };
  std::deque<WorkItem> ready_;
  std::vector<std::weak_ptr<Sweepable>> sweeps_;
  std::optional<MonoTime> earliest_sweep_due_;
  bool sim_time_ = false;

  std::atomic<bool> shutdown_{false};
  std::atomic<uint64_t> serializations_{0};
  uint64_t foreign_packets_ = 0;
  uint64_t datagrams_received_ = 0;
  uint64_t decode_errors_ = 0;
  uint64_t unsecured_rejected_ = 0;
  uint64_t callback_errors_ = 0;
  MonoTime last_reassembly_prune_{};
};

/// Spins the context until the predicate holds or the (real or simulated)
/// deadline passes. Test helper.
bool spin_until(Context& ctx, const std::function<bool()>& pred, Duration timeout);

}  // namespace mbus::core
