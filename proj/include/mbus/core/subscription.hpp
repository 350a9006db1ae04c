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

#include <deque>
#include <memory>

#include "mbus/core/events.hpp"
#include "mbus/interfaces/message_value.hpp"
#include "mbus/transport/reader.hpp"

namespace mbus::core {

class Context;
class Node;

struct MessageInfo {
  Guid writer{};
  uint64_t seq = 0;
  MonoTime source_ts{};
  bool intra_process = false;
};

using MessageCallback =
    std::function<void(const interfaces::MessageValue&, const MessageInfo&)>;
using RawMessageCallback = std::function<void(BytesView payload, const MessageInfo&)>;

struct SubscriptionOptions {
  EndpointEventCallback on_event;
};

/// Subscribing endpoint. Messages queue (bounded by KEEP_LAST depth) until
/// the executor dispatches the callback; no two callbacks of one
/// subscription ever overlap under the reference executor.
class Subscription : public std::enable_shared_from_this<Subscription> {
 public:
  const std::string& topic() const { return topic_; }
  const transport::QosProfile& qos() const { return reader_.qos(); }
  const Guid& guid() const { return reader_.guid(); }
  uint64_t type_hash() const { return type_hash_; }

  size_t matched_count() const;
  size_t queued() const { return queue_.size(); }
  uint64_t delivered_count() const { return delivered_count_; }
  uint64_t queue_overflow_drops() const { return queue_overflow_drops_; }
  uint64_t lifespan_drops() const { return lifespan_drops_; }

  void destroy();

 private:
  friend class Context;
  friend class Node;
  friend class Publisher;

  Subscription(Context& ctx, Node& node, std::string topic, std::string type_name,
               uint64_t type_hash, interfaces::TypeDescriptorPtr descriptor,
               transport::QosProfile qos, Guid guid, transport::ReaderConfig rcfg,
               MessageCallback cb, RawMessageCallback raw_cb, SubscriptionOptions opts);

  struct Queued {
    std::shared_ptr<const interfaces::MessageValue> value;  // intra path
    Bytes bytes;                                            // wire path
    MessageInfo info;
  };

  void enqueue(Queued q);             // bounds by history depth
  bool dispatch_one();                // executor context: pops + runs callback
  void push_event(EndpointEvent ev);  // queued, dispatched as EVENT items
  bool dispatch_event();

  Context& ctx_;
  Node* node_;
  std::string topic_;
  std::string type_name_;
  uint64_t type_hash_;
  interfaces::TypeDescriptorPtr descriptor_;  // null for raw subscriptions
  transport::DataReader reader_;
  MessageCallback callback_;
  RawMessageCallback raw_callback_;
  SubscriptionOptions opts_;

  std::deque<Queued> queue_;
  std::deque<EndpointEvent> events_;
  bool in_callback_ = false;  // reentrancy guard backing the no-overlap assert
  uint64_t delivered_count_ = 0;
  uint64_t queue_overflow_drops_ = 0;
  uint64_t lifespan_drops_ = 0;

  // deadline tracking
  MonoTime deadline_base_{};
  // manual-liveliness tracking per matched writer
  std::map<Guid, MonoTime> writer_last_alive_;
  std::map<Guid, bool> writer_alive_;
  bool destroyed_ = false;
};

}  // namespace mbus::core
