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

#include "mbus/rpc/service.hpp"

#include "mbus/core/context.hpp"

namespace mbus::rpc {

namespace detail {

namespace {

transport::QosProfile service_qos() {
  transport::QosProfile q;
  q.reliability = transport::Reliability::Reliable;
  q.durability = transport::Durability::Volatile;
  q.history = transport::History::KeepAll;
  return q;
}

// request payload: client guid (16) + corr (8) + body
Bytes frame_request(const Guid& client, uint64_t corr, BytesView body) {
  ByteWriter w(24 + body.size());
  w.raw(client.bytes.data(), 16);
  w.u64(corr);
  w.raw(body);
  return w.take();
}

// response payload: client guid (16) + corr (8) + status (1) + body/error
Bytes frame_response(const Guid& client, uint64_t corr, const Result<Bytes>& result) {
  ByteWriter w(32);
  w.raw(client.bytes.data(), 16);
  w.u64(corr);
  if (result.ok()) {
    w.u8(0);
    w.raw(result.value());
  } else {
    w.u8(1);
    w.str(result.error().message);
  }
  return w.take();
}

}  // namespace

ServiceTopicInfo service_topics(const std::string& resolved_service, uint64_t request_type_hash,
                                uint64_t response_type_hash) {
  ByteWriter w(16);
  w.u64(request_type_hash);
  w.u64(response_type_hash);
  uint64_t service_hash = interfaces::fnv1a64(BytesView(w.data()));

  auto role_hash = [service_hash](const char* role) {
    ByteWriter rw(16);
    rw.u64(service_hash);
    rw.raw(role, strlen(role));
    return interfaces::fnv1a64(BytesView(rw.data()));
  };
  ServiceTopicInfo info;
  info.request_topic = "/svc" + resolved_service + "/request";
  info.response_topic = "/svc" + resolved_service + "/response";
  info.request_hash = role_hash("request");
  info.response_hash = role_hash("response");
  return info;
}

Result<std::shared_ptr<RawServiceServer>> RawServiceServer::create(
    core::Node& node, const std::string& service, const std::string& type_label,
    uint64_t request_hash, uint64_t response_hash, RawHandler handler) {
  if (service.empty()) return Error{Errc::validation_error, "empty service name"};
  auto server = std::shared_ptr<RawServiceServer>(new RawServiceServer());
  server->service_ = node.resolve(service);
  server->handler_ = std::move(handler);
  server->ctx_ = &node.context();

  auto topics = service_topics(server->service_, request_hash, response_hash);
  core::PublisherOptions sys_pub;
  sys_pub.system = true;
  auto pub = node.create_raw_publisher(topics.response_topic, type_label + "Response",
                                       topics.response_hash, service_qos(), sys_pub);
  if (!pub.ok()) return pub.error();
  server->response_pub_ = pub.value();

  std::weak_ptr<RawServiceServer> weak = server;
  auto sub = node.create_raw_subscription(
      topics.request_topic, type_label + "Request", topics.request_hash, service_qos(),
      [weak](BytesView payload, const core::MessageInfo&) {
        auto self = weak.lock();
        if (!self) return;
        if (payload.size() < 24) return;
        Guid client;
        std::memcpy(client.bytes.data(), payload.data(), 16);
        ByteReader r(payload.subspan(16));
        uint64_t corr = r.u64();
        Bytes body(payload.begin() + 24, payload.end());
        // one SERVICE_REQUEST work item per request
        self->ctx_->post_work(core::WorkKind::ServiceRequest, [self, client, corr,
                                                               body = std::move(body)]() {
          auto result = self->handler_(BytesView(body));
          ++self->served_;
          (void)self->response_pub_->publish_serialized(frame_response(client, corr, result));
          return true;
        });
      });
  if (!sub.ok()) return sub.error();
  server->request_sub_ = sub.value();

  // Introspection marker so tooling lists the service under its node.
  discovery::EndpointInfo marker;
  marker.direction = discovery::EndpointDirection::ServiceServer;
  marker.topic_name = server->service_;
  marker.type_name = type_label;
  marker.type_hash = request_hash ^ response_hash;
  marker.qos = service_qos();
  marker.endpoint_guid = node.context().next_endpoint_guid();
  marker.owning_node = node.fqn();
  server->marker_guid_ = marker.endpoint_guid;
  node.context().register_endpoint_marker(std::move(marker));
  return server;
}

Result<std::shared_ptr<RawServiceClient>> RawServiceClient::create(
    core::Node& node, const std::string& service, const std::string& type_label,
    uint64_t request_hash, uint64_t response_hash) {
  if (service.empty()) return Error{Errc::validation_error, "empty service name"};
  auto client = std::shared_ptr<RawServiceClient>(new RawServiceClient());
  client->service_ = node.resolve(service);
  client->ctx_ = &node.context();

  auto topics = service_topics(client->service_, request_hash, response_hash);
  core::PublisherOptions sys_pub;
  sys_pub.system = true;
  auto pub = node.create_raw_publisher(topics.request_topic, type_label + "Request",
                                       topics.request_hash, service_qos(), sys_pub);
  if (!pub.ok()) return pub.error();
  client->request_pub_ = pub.value();

  std::weak_ptr<RawServiceClient> weak = client;
  auto sub = node.create_raw_subscription(
      topics.response_topic, type_label + "Response", topics.response_hash, service_qos(),
      [weak](BytesView payload, const core::MessageInfo&) {
        auto self = weak.lock();
        if (self) self->on_response(payload);
      });
  if (!sub.ok()) return sub.error();
  client->response_sub_ = sub.value();

  discovery::EndpointInfo marker;
  marker.direction = discovery::EndpointDirection::ServiceClient;
  marker.topic_name = client->service_;
  marker.type_name = type_label;
  marker.type_hash = request_hash ^ response_hash;
  marker.qos = service_qos();
  marker.endpoint_guid = node.context().next_endpoint_guid();
  marker.owning_node = node.fqn();
  client->marker_guid_ = marker.endpoint_guid;
  node.context().register_endpoint_marker(std::move(marker));

  node.context().register_sweep(client);
  return client;
}

bool RawServiceClient::service_ready() const {
  return request_pub_->matched_count() > 0 && response_sub_->matched_count() > 0;
}

Status RawServiceClient::async_call(Bytes request, RawResponseCallback callback,
                                    std::optional<Duration> timeout) {
  MonoTime now = ctx_->clock().now();
  Duration limit = timeout.value_or(ctx_->config().service_timeout);
  uint64_t corr = next_corr_++;
  pending_[corr] = Pending{std::move(callback), now + limit};
  Bytes framed = frame_request(ctx_->participant_guid(), corr, request);
  if (service_ready()) {
    return request_pub_->publish_serialized(std::move(framed));
  }
  // Server not up yet: held locally, published as soon as discovery matches.
  waiting_.push_back(Waiting{corr, std::move(framed), now + limit});
  return {};
}

void RawServiceClient::on_response(BytesView payload) {
  if (payload.size() < 25) return;
  Guid client;
  std::memcpy(client.bytes.data(), payload.data(), 16);
  if (!(client == ctx_->participant_guid())) return;  // another caller's reply
  ByteReader r(payload.subspan(16));
  uint64_t corr = r.u64();
  uint8_t status = r.u8();
  if (status == 0) {
    Bytes body(payload.begin() + 25, payload.end());
    complete(corr, std::move(body));
  } else {
    complete(corr, Error{Errc::unavailable, r.str()});
  }
}

void RawServiceClient::complete(uint64_t corr, Result<Bytes> result) {
  auto it = pending_.find(corr);
  if (it == pending_.end()) return;  // late duplicate or already timed out
  RawResponseCallback cb = std::move(it->second.callback);
  pending_.erase(it);
  std::erase_if(waiting_, [corr](const Waiting& w) { return w.corr == corr; });
  ctx_->post_work(core::WorkKind::ServiceResponse,
                  [cb = std::move(cb), result = std::move(result)]() {
                    cb(result);
                    return true;
                  });
}

std::optional<MonoTime> RawServiceClient::sweep(MonoTime now) {
  // flush held requests once the server is matched
  if (!waiting_.empty() && service_ready()) {
    auto held = std::move(waiting_);
    waiting_.clear();
    for (auto& w : held) (void)request_pub_->publish_serialized(std::move(w.request));
  }
  // expire timeouts
  std::vector<uint64_t> expired;
  for (const auto& [corr, pending] : pending_)
    if (now >= pending.deadline) expired.push_back(corr);
  for (uint64_t corr : expired)
    complete(corr, Error{Errc::timeout, "service call timed out: " + service_});

  std::optional<MonoTime> next;
  for (const auto& [corr, pending] : pending_)
    if (!next || pending.deadline < *next) next = pending.deadline;
  return next;
}

}  // namespace detail

Status ServiceClient::async_call(const interfaces::MessageValue& request,
                                 ResponseCallback callback, std::optional<Duration> timeout) {
  auto bytes = interfaces::serialize(request);
  if (!bytes.ok()) return bytes.error();
  auto response_type = response_type_;
  return raw_->async_call(std::move(bytes.value()),
                          [response_type, callback = std::move(callback)](Result<Bytes> result) {
                            if (!result.ok()) {
                              callback(result.error());
                              return;
                            }
                            auto msg = interfaces::deserialize(result.value(), response_type);
                            if (!msg.ok()) {
                              callback(msg.error());
                              return;
                            }
                            callback(std::move(msg.value()));
                          },
                          timeout);
}

}  // namespace mbus::rpc

// Node factory methods for services live with the rpc implementation.
namespace mbus::core {

Result<std::shared_ptr<rpc::ServiceServer>> Node::create_service(
    const std::string& service, interfaces::TypeDescriptorPtr request_type,
    interfaces::TypeDescriptorPtr response_type, rpc::ServiceHandler handler) {
  if (!request_type || !response_type)
    return Error{Errc::validation_error, "null service type descriptor"};
  auto raw_handler = [request_type, response_type,
                      handler = std::move(handler)](BytesView body) -> Result<Bytes> {
    auto request = interfaces::deserialize(body, request_type);
    if (!request.ok()) return request.error();
    auto response = handler(request.value());
    if (!response.ok()) return response.error();
    if (!response.value().descriptor()->structurally_equal(*response_type))
      return Error{Errc::schema_error, "handler returned wrong response type"};
    return interfaces::serialize(response.value());
  };
  auto raw = rpc::detail::RawServiceServer::create(*this, service, request_type->name(),
                                                   request_type->hash(), response_type->hash(),
                                                   std::move(raw_handler));
  if (!raw.ok()) return raw.error();
  auto server = std::shared_ptr<rpc::ServiceServer>(new rpc::ServiceServer());
  server->raw_ = raw.value();
  services_.push_back(server);
  return server;
}

Result<std::shared_ptr<rpc::ServiceClient>> Node::create_client(
    const std::string& service, interfaces::TypeDescriptorPtr request_type,
    interfaces::TypeDescriptorPtr response_type) {
  if (!request_type || !response_type)
    return Error{Errc::validation_error, "null service type descriptor"};
  auto raw = rpc::detail::RawServiceClient::create(*this, service, request_type->name(),
                                                   request_type->hash(), response_type->hash());
  if (!raw.ok()) return raw.error();
  auto client = std::shared_ptr<rpc::ServiceClient>(new rpc::ServiceClient());
  client->raw_ = raw.value();
  client->response_type_ = std::move(response_type);
  services_.push_back(client);
  return client;
}

}  // namespace mbus::core
