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
#include "mbus/transport/writer.hpp"

namespace mbus::core {

class Context;
class Node;
class Subscription;

struct PublisherOptions {
  EndpointEventCallback on_event;  // IncompatibleQos, TypeMismatch, Matched...
  // System endpoints (service frames, lifecycle/parameter events) keep
  // working in every lifecycle state; only user topic publishers are gated.
  bool system = false;
};

/// Publishing endpoint. publish() serializes at most once per message and
/// only when a wire reader needs bytes; same-process matched subscriptions
/// receive the immutable value directly. Owner-context only.
class Publisher : public std::enable_shared_from_this<Publisher> {
 public:
  const std::string& topic() const { return topic_; }
  const transport::QosProfile& qos() const { return writer_.qos(); }
  const Guid& guid() const { return writer_.guid(); }
  uint64_t type_hash() const { return type_hash_; }

  /// Typed publish. The value is shared immutably with in-process readers;
  /// callers must not mutate it afterwards.
  Status publish(interfaces::MessageValue message);
  Status publish(std::shared_ptr<const interfaces::MessageValue> message);

  /// Pre-serialized payload (tooling replay, recorded traffic).
  Status publish_serialized(Bytes payload);

  size_t matched_count() const;
  uint64_t inactive_drops() const { return inactive_drops_; }

  /// Reliable writers: everything written has been acknowledged.
  bool fully_acked() const { return writer_.fully_acked(); }

  void destroy();  // unregisters the endpoint; announced on next tick

 private:
  friend class Context;
  friend class Node;

  Publisher(Context& ctx, Node& node, std::string topic, std::string type_name,
            uint64_t type_hash, interfaces::TypeDescriptorPtr descriptor,
            transport::QosProfile qos, Guid guid, transport::WriterConfig wcfg,
            PublisherOptions opts);

  struct Retained {
    uint64_t seq;
    std::shared_ptr<const interfaces::MessageValue> value;  // may be null for raw
    Bytes bytes;                                            // filled when serialized
    bool has_bytes = false;
    MonoTime source_ts;
  };

  Status publish_impl(std::shared_ptr<const interfaces::MessageValue> value, Bytes bytes,
                      bool have_bytes);
  const Bytes& retained_bytes(Retained& r);  // serializes lazily
  void push_event(EndpointEvent ev);
  bool dispatch_event();

  Context& ctx_;
  Node* node_;
  std::string topic_;
  std::string type_name_;
  uint64_t type_hash_;
  interfaces::TypeDescriptorPtr descriptor_;  // null for raw publishers
  transport::DataWriter writer_;
  PublisherOptions opts_;

  std::vector<std::weak_ptr<Subscription>> local_subs_;
  std::deque<Retained> retained_;  // transient-local history at value level
  std::deque<EndpointEvent> events_;
  uint64_t inactive_drops_ = 0;
  bool destroyed_ = false;
};

}  // namespace mbus::core
