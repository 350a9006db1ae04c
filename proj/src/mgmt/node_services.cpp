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
#include "mbus/interfaces/schema.hpp"
#include "mbus/rpc/service.hpp"

namespace mbus::core {

using interfaces::MessageValue;
using interfaces::Primitive;
using interfaces::Value;
using mgmt::ParameterValue;

namespace {

const interfaces::SchemaRegistry& mgmt_types() {
  static const interfaces::SchemaRegistry reg = interfaces::builtin_schemas();
  return reg;
}

std::string get_str(const MessageValue& m, const char* field) {
  const auto* v = m.get(field);
  if (!v) return {};
  const auto* p = std::get_if<Primitive>(&v->data);
  if (!p) return {};
  const auto* s = std::get_if<std::string>(p);
  return s ? *s : std::string{};
}

uint8_t get_u8(const MessageValue& m, const char* field) {
  const auto* v = m.get(field);
  if (!v) return 0;
  const auto* p = std::get_if<Primitive>(&v->data);
  if (!p) return 0;
  const auto* b = std::get_if<uint8_t>(p);
  return b ? *b : 0;
}

MessageValue ok_response(const interfaces::TypeDescriptorPtr& type) {
  MessageValue m(type);
  (void)m.set("ok", Value(Primitive(uint8_t{1})));
  return m;
}

MessageValue error_response(const interfaces::TypeDescriptorPtr& type, const Error& err) {
  MessageValue m(type);
  (void)m.set("ok", Value(Primitive(uint8_t{0})));
  (void)m.set("error", Value(Primitive(std::string(err.message))));
  return m;
}

std::string blob_str(const Bytes& b) { return std::string(b.begin(), b.end()); }
Bytes str_blob(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace

void install_node_builtins(Node& node) {
  const auto& reg = mgmt_types();
  auto get_req = reg.find("mgmt/ParamGetRequest");
  auto get_resp = reg.find("mgmt/ParamGetResponse");
  auto set_req = reg.find("mgmt/ParamSetRequest");
  auto set_resp = reg.find("mgmt/ParamSetResponse");
  auto list_req = reg.find("mgmt/ParamListRequest");
  auto list_resp = reg.find("mgmt/ParamListResponse");
  auto desc_req = reg.find("mgmt/ParamDescribeRequest");
  auto desc_resp = reg.find("mgmt/ParamDescribeResponse");
  auto event_type = reg.find("mgmt/ParameterEvent");

  PublisherOptions sys_pub;
  sys_pub.system = true;
  auto events = node.create_publisher("/parameter_events", event_type,
                                      transport::QosProfile::reliable_keep_last(32), sys_pub);
  if (events.ok()) node.param_events_pub_ = events.value();

  auto weak = node.weak_from_this();

  (void)node.create_service(
      "~/param/get", get_req, get_resp,
      [weak, get_resp](const MessageValue& req) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        auto value = self->get_parameter(get_str(req, "name"));
        if (!value.ok()) return error_response(get_resp, value.error());
        auto resp = ok_response(get_resp);
        (void)resp.set("value", Value(Primitive(blob_str(
                                    mgmt::parameter_value_bytes(value.value())))));
        return resp;
      });

  (void)node.create_service(
      "~/param/set", set_req, set_resp,
      [weak, set_resp](const MessageValue& req) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        auto value = mgmt::parameter_value_from_bytes(str_blob(get_str(req, "value")));
        if (!value.ok()) return error_response(set_resp, value.error());
        auto st = self->set_parameter(get_str(req, "name"), std::move(value.value()));
        if (!st.ok()) return error_response(set_resp, st.error());
        return ok_response(set_resp);
      });

  (void)node.create_service(
      "~/param/list", list_req, list_resp,
      [weak, list_resp](const MessageValue& req) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        auto names = self->list_parameters(get_str(req, "prefix"));
        MessageValue resp(list_resp);
        std::vector<Primitive> arr;
        arr.reserve(names.size());
        for (auto& n : names) arr.push_back(Primitive(std::move(n)));
        (void)resp.set("names", Value(std::move(arr)));
        return resp;
      });

  (void)node.create_service(
      "~/param/describe", desc_req, desc_resp,
      [weak, desc_resp](const MessageValue& req) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        auto rec = self->describe_parameter(get_str(req, "name"));
        if (!rec.ok()) return error_response(desc_resp, rec.error());
        auto resp = ok_response(desc_resp);
        (void)resp.set("name", Value(Primitive(rec.value().name)));
        (void)resp.set("type",
                       Value(Primitive(static_cast<uint8_t>(rec.value().declared_type))));
        (void)resp.set("read_only", Value(Primitive(uint8_t{rec.value().read_only})));
        (void)resp.set("description", Value(Primitive(rec.value().description)));
        (void)resp.set("value", Value(Primitive(blob_str(
                                    mgmt::parameter_value_bytes(rec.value().value)))));
        return resp;
      });
}

void install_lifecycle_builtins(Node& node) {
  const auto& reg = mgmt_types();
  auto change_req = reg.find("mgmt/ChangeStateRequest");
  auto change_resp = reg.find("mgmt/ChangeStateResponse");
  auto get_req = reg.find("mgmt/GetStateRequest");
  auto get_resp = reg.find("mgmt/GetStateResponse");
  auto event_type = reg.find("mgmt/LifecycleEvent");

  // Late monitors immediately receive the current state.
  transport::QosProfile event_qos = transport::QosProfile::transient_local(1);
  PublisherOptions sys_pub;
  sys_pub.system = true;
  auto events = node.create_publisher("~/lifecycle/events", event_type, event_qos, sys_pub);
  if (events.ok()) node.lifecycle_events_pub_ = events.value();

  auto weak = node.weak_from_this();

  (void)node.create_service(
      "~/lifecycle/change_state", change_req, change_resp,
      [weak, change_resp](const MessageValue& req) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        auto request = static_cast<mgmt::TransitionRequest>(get_u8(req, "transition"));
        if (static_cast<uint8_t>(request) > 4)
          return Error{Errc::validation_error, "bad transition code"};
        auto result = self->trigger_transition(request);
        MessageValue resp(change_resp);
        if (result.ok()) {
          (void)resp.set("ok", Value(Primitive(uint8_t{1})));
          (void)resp.set("state",
                         Value(Primitive(static_cast<uint8_t>(result.value()))));
        } else {
          (void)resp.set("ok", Value(Primitive(uint8_t{0})));
          (void)resp.set("error", Value(Primitive(result.error().message)));
          (void)resp.set("state",
                         Value(Primitive(static_cast<uint8_t>(self->lifecycle_state()))));
        }
        return resp;
      });

  (void)node.create_service(
      "~/lifecycle/get_state", get_req, get_resp,
      [weak, get_resp](const MessageValue&) -> Result<MessageValue> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "node gone"};
        MessageValue resp(get_resp);
        (void)resp.set("state",
                       Value(Primitive(static_cast<uint8_t>(self->lifecycle_state()))));
        return resp;
      });

  // Publish the initial state for late joiners.
  node.publish_lifecycle_event(node.lifecycle_state());
}

void Node::publish_lifecycle_event(mgmt::LifecycleState previous) {
  if (!lifecycle_events_pub_) return;
  auto type = mgmt_types().find("mgmt/LifecycleEvent");
  MessageValue ev(type);
  (void)ev.set("node", Value(Primitive(fqn_)));
  (void)ev.set("previous", Value(Primitive(static_cast<uint8_t>(previous))));
  (void)ev.set("current", Value(Primitive(static_cast<uint8_t>(lifecycle_state_))));
  (void)lifecycle_events_pub_->publish(std::move(ev));
}

void Node::publish_parameter_event(const std::string& name, uint8_t op) {
  if (!param_events_pub_) return;
  auto rec = params_.describe(name);
  if (!rec.ok()) return;
  auto type = mgmt_types().find("mgmt/ParameterEvent");
  MessageValue ev(type);
  (void)ev.set("node", Value(Primitive(fqn_)));
  (void)ev.set("name", Value(Primitive(name)));
  (void)ev.set("op", Value(Primitive(op)));
  (void)ev.set("type", Value(Primitive(static_cast<uint8_t>(rec.value().declared_type))));
  (void)ev.set("value", Value(Primitive(
                            blob_str(mgmt::parameter_value_bytes(rec.value().value)))));
  (void)param_events_pub_->publish(std::move(ev));
}

}  // namespace mbus::core
