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

#include "mbus/core/subscription.hpp"

#include <cassert>

#include "mbus/core/context.hpp"

namespace mbus::core {

Subscription::Subscription(Context& ctx, Node& node, std::string topic, std::string type_name,
                           uint64_t type_hash, interfaces::TypeDescriptorPtr descriptor,
                           transport::QosProfile qos, Guid guid, transport::ReaderConfig rcfg,
                           MessageCallback cb, RawMessageCallback raw_cb,
                           SubscriptionOptions opts)
    : ctx_(ctx),
      node_(&node),
      topic_(std::move(topic)),
      type_name_(std::move(type_name)),
      type_hash_(type_hash),
      descriptor_(std::move(descriptor)),
      reader_(guid, interfaces::compute_topic_id(topic_, type_hash), qos, rcfg),
      callback_(std::move(cb)),
      raw_callback_(std::move(raw_cb)),
      opts_(std::move(opts)) {}

size_t Subscription::matched_count() const {
  return ctx_.graph().matched_writers(reader_.guid()).size();
}

void Subscription::enqueue(Queued q) {
  if (destroyed_) return;
  queue_.push_back(std::move(q));
  if (reader_.qos().history == transport::History::KeepLast) {
    while (queue_.size() > reader_.qos().depth) {
      queue_.pop_front();
      ++queue_overflow_drops_;
    }
  }
  std::weak_ptr<Subscription> weak = weak_from_this();
  ctx_.post_work(WorkKind::Message, [weak]() {
    auto self = weak.lock();
    return self ? self->dispatch_one() : false;
  });
}

bool Subscription::dispatch_one() {
  if (queue_.empty() || destroyed_) return false;
  Queued q = std::move(queue_.front());
  queue_.pop_front();

  MonoTime now = ctx_.clock().now();
  // Lifespan holds for queued intra-process values too.
  if (q.info.intra_process && reader_.qos().lifespan &&
      now - q.info.source_ts > *reader_.qos().lifespan) {
    ++lifespan_drops_;
    return false;
  }

  assert(!in_callback_ && "subscription callbacks must never overlap");
  in_callback_ = true;
  deadline_base_ = now;
  ++delivered_count_;

  if (raw_callback_) {
    if (q.value) {
      // intra-process value handed to a raw consumer: serialize on demand
      auto bytes = interfaces::serialize(*q.value);
      if (bytes.ok()) raw_callback_(BytesView(bytes.value()), q.info);
    } else {
      raw_callback_(BytesView(q.bytes), q.info);
    }
  } else if (callback_) {
    if (q.value) {
      callback_(*q.value, q.info);
    } else if (descriptor_) {
      auto msg = interfaces::deserialize(q.bytes, descriptor_);
      if (msg.ok()) callback_(msg.value(), q.info);
    }
  }
  in_callback_ = false;
  return true;
}

void Subscription::push_event(EndpointEvent ev) {
  if (!opts_.on_event || destroyed_) return;
  events_.push_back(std::move(ev));
  std::weak_ptr<Subscription> weak = weak_from_this();
  ctx_.post_work(WorkKind::Event, [weak]() {
    auto self = weak.lock();
    return self ? self->dispatch_event() : false;
  });
}

bool Subscription::dispatch_event() {
  if (events_.empty() || destroyed_) return false;
  EndpointEvent ev = std::move(events_.front());
  events_.pop_front();
  if (opts_.on_event) opts_.on_event(ev);
  return true;
}

void Subscription::destroy() {
  if (destroyed_) return;
  destroyed_ = true;
  ctx_.unregister_endpoint(reader_.guid());
}

}  // namespace mbus::core
