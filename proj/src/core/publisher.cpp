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

#include "mbus/core/publisher.hpp"

#include <thread>

#include "mbus/core/context.hpp"

namespace mbus::core {

Publisher::Publisher(Context& ctx, Node& node, std::string topic, std::string type_name,
                     uint64_t type_hash, interfaces::TypeDescriptorPtr descriptor,
                     transport::QosProfile qos, Guid guid, transport::WriterConfig wcfg,
                     PublisherOptions opts)
    : ctx_(ctx),
      node_(&node),
      topic_(std::move(topic)),
      type_name_(std::move(type_name)),
      type_hash_(type_hash),
      descriptor_(std::move(descriptor)),
      writer_(guid, interfaces::compute_topic_id(topic_, type_hash), qos, wcfg),
      opts_(std::move(opts)) {}

size_t Publisher::matched_count() const {
  size_t local = 0;
  for (const auto& weak : local_subs_)
    if (!weak.expired()) ++local;
  return writer_.reader_count() + local;
}

Status Publisher::publish(interfaces::MessageValue message) {
  if (descriptor_ && !message.descriptor()->structurally_equal(*descriptor_))
    return Error{Errc::schema_error, "message type does not match publisher type"};
  return publish_impl(std::make_shared<interfaces::MessageValue>(std::move(message)), {}, false);
}

Status Publisher::publish(std::shared_ptr<const interfaces::MessageValue> message) {
  if (!message) return Error{Errc::validation_error, "null message"};
  if (descriptor_ && !message->descriptor()->structurally_equal(*descriptor_))
    return Error{Errc::schema_error, "message type does not match publisher type"};
  return publish_impl(std::move(message), {}, false);
}

Status Publisher::publish_serialized(Bytes payload) {
  return publish_impl(nullptr, std::move(payload), true);
}

Status Publisher::publish_impl(std::shared_ptr<const interfaces::MessageValue> value,
                               Bytes bytes, bool have_bytes) {
  if (destroyed_) return Error{Errc::unavailable, "publisher destroyed"};
  // Managed nodes emit only while ACTIVE; other states drop silently into a
  // diagnostic counter.
  if (!opts_.system && node_ && node_->managed() &&
      node_->lifecycle_state() != mgmt::LifecycleState::Active) {
    ++inactive_drops_;
    return {};
  }
  MonoTime now = ctx_.clock().now();

  std::erase_if(local_subs_, [](const std::weak_ptr<Subscription>& w) { return w.expired(); });
  bool intra_values = ctx_.config().intra_process;
  bool need_wire = writer_.reader_count() > 0;
  // Without the intra-process path, local delivery still happens in-process
  // but through serialized bytes, like any other reader.
  bool need_bytes = need_wire || (!intra_values && !local_subs_.empty());

  uint64_t seq;
  if (need_bytes && !have_bytes) {
    auto serialized = interfaces::serialize(*value);
    if (!serialized.ok()) return serialized.error();
    bytes = std::move(serialized.value());
    have_bytes = true;
    ctx_.bump_serializations();
  }
  if (need_wire) {
    std::vector<transport::OutboundPacket> out;
    auto res = writer_.publish(bytes, now, out);
    if (!res.ok()) return res.error();
    seq = res.value();

    // Fragment pacing: large bursts overwhelm small kernel socket buffers.
    size_t burst = ctx_.config().max_burst_fragments;
    Duration pause = ctx_.config().burst_interval;
    if (burst == 0 || pause <= Duration::zero()) burst = out.size();
    for (size_t offset = 0; offset < out.size(); offset += burst) {
      if (offset > 0) std::this_thread::sleep_for(pause);
      ctx_.send_data_packets(out, offset, std::min(offset + burst, out.size()),
                             writer_.guid());
    }
  } else {
    seq = writer_.advance_seq(now);
  }

  if (writer_.qos().durability == transport::Durability::TransientLocal) {
    Retained r;
    r.seq = seq;
    r.value = value;
    r.source_ts = now;
    if (have_bytes) {
      r.bytes = bytes;
      r.has_bytes = true;
    }
    retained_.push_back(std::move(r));
    if (writer_.qos().history == transport::History::KeepLast)
      while (retained_.size() > writer_.qos().depth) retained_.pop_front();
  }

  for (auto& weak : local_subs_) {
    auto sub = weak.lock();
    if (!sub) continue;
    Subscription::Queued q;
    if (intra_values && value) {
      q.value = value;  // immutable shared value: the zero-copy fast path
    } else {
      q.bytes = bytes;
    }
    q.info.writer = writer_.guid();
    q.info.seq = seq;
    q.info.source_ts = now;
    q.info.intra_process = intra_values;
    sub->enqueue(std::move(q));
  }
  return {};
}

const Bytes& Publisher::retained_bytes(Retained& r) {
  if (!r.has_bytes) {
    auto serialized = interfaces::serialize(*r.value);
    if (serialized.ok()) {
      r.bytes = std::move(serialized.value());
      r.has_bytes = true;
      ctx_.bump_serializations();
    }
  }
  return r.bytes;
}

void Publisher::push_event(EndpointEvent ev) {
  if (!opts_.on_event) return;
  events_.push_back(std::move(ev));
  std::weak_ptr<Publisher> weak = weak_from_this();
  ctx_.post_work(WorkKind::Event, [weak]() {
    auto self = weak.lock();
    return self ? self->dispatch_event() : false;
  });
}

bool Publisher::dispatch_event() {
  if (events_.empty()) return false;
  EndpointEvent ev = std::move(events_.front());
  events_.pop_front();
  if (opts_.on_event) opts_.on_event(ev);
  return true;
}

void Publisher::destroy() {
  if (destroyed_) return;
  destroyed_ = true;
  ctx_.unregister_endpoint(writer_.guid());
}

}  // namespace mbus::core
