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

#include "mbus/core/composition.hpp"

#include <cstdio>

#include "mbus/interfaces/schema.hpp"
#include "mbus/rpc/action.hpp"

namespace mbus::core {

using interfaces::MessageValue;
using interfaces::Primitive;
using interfaces::Value;

Result<std::vector<std::shared_ptr<Node>>> compose(
    Context& ctx, const std::vector<NodeFactory>& factories) {
  std::vector<std::shared_ptr<Node>> nodes;
  nodes.reserve(factories.size());
  for (const auto& factory : factories) {
    auto node = factory(ctx);
    if (!node.ok()) return node.error();
    nodes.push_back(node.value());
  }
  return nodes;
}

ComponentRegistry& ComponentRegistry::instance() {
  static ComponentRegistry registry;
  return registry;
}

void ComponentRegistry::add(const std::string& name, NodeFactory factory) {
  factories_[name] = std::move(factory);
}

Result<std::shared_ptr<Node>> ComponentRegistry::instantiate(const std::string& name,
                                                             Context& ctx) const {
  auto it = factories_.find(name);
  if (it == factories_.end())
    return Error{Errc::not_found, "unknown component '" + name + "'"};
  return it->second(ctx);
}

std::vector<std::string> ComponentRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, factory] : factories_) out.push_back(name);
  return out;
}

namespace {

int64_t get_i64(const MessageValue& m, const char* field) {
  const auto* v = m.get(field);
  if (!v) return 0;
  const auto* p = std::get_if<Primitive>(&v->data);
  if (!p) return 0;
  const auto* i = std::get_if<int64_t>(p);
  return i ? *i : 0;
}

}  // namespace

void register_demo_components() {
  auto& registry = ComponentRegistry::instance();
  static const auto schemas = interfaces::builtin_schemas();

  registry.add("talker", [](Context& ctx) -> Result<std::shared_ptr<Node>> {
    auto node = ctx.create_node("talker");
    if (!node.ok()) return node;
    auto type = schemas.find("demo/Value");
    auto pub = node.value()->create_publisher("chatter", type,
                                              transport::QosProfile::reliable_keep_last(16));
    if (!pub.ok()) return pub.error();
    auto counter = std::make_shared<int64_t>(0);
    auto publisher = pub.value();
    auto timer = node.value()->create_timer(std::chrono::milliseconds(100),
                                            [publisher, type, counter]() {
                                              MessageValue msg(type);
                                              (void)msg.set("data", Value(Primitive((*counter)++)));
                                              (void)publisher->publish(std::move(msg));
                                            });
    if (!timer.ok()) return timer.error();
    return node;
  });

  registry.add("listener", [](Context& ctx) -> Result<std::shared_ptr<Node>> {
    auto node = ctx.create_node("listener");
    if (!node.ok()) return node;
    auto type = schemas.find("demo/Value");
    auto sub = node.value()->create_subscription(
        "chatter", type, transport::QosProfile::reliable_keep_last(16),
        [](const MessageValue& msg, const MessageInfo&) {
          std::printf("heard: %lld\n", static_cast<long long>(get_i64(msg, "data")));
          std::fflush(stdout);
        });
    if (!sub.ok()) return sub.error();
    return node;
  });

  registry.add("adder", [](Context& ctx) -> Result<std::shared_ptr<Node>> {
    auto node = ctx.create_node("adder");
    if (!node.ok()) return node;
    auto req = schemas.find("demo/AddTwoIntsRequest");
    auto resp = schemas.find("demo/AddTwoIntsResponse");
    auto srv = node.value()->create_service(
        "add_two_ints", req, resp,
        [resp](const MessageValue& request) -> Result<MessageValue> {
          MessageValue response(resp);
          (void)response.set(
              "sum", Value(Primitive(get_i64(request, "a") + get_i64(request, "b"))));
          return response;
        });
    if (!srv.ok()) return srv.error();
    return node;
  });

  registry.add("countdown", [](Context& ctx) -> Result<std::shared_ptr<Node>> {
    auto node = ctx.create_node("countdown");
    if (!node.ok()) return node;
    auto goal_t = schemas.find("demo/CountdownGoal");
    auto fb_t = schemas.find("demo/CountdownFeedback");
    auto res_t = schemas.find("demo/CountdownResult");
    auto remaining = std::make_shared<std::map<rpc::GoalId, int64_t>>();
    rpc::ActionServerCallbacks callbacks;
    callbacks.accept = [](const MessageValue& goal) { return get_i64(goal, "from") >= 0; };
    callbacks.step = [remaining, fb_t, res_t](rpc::ServerGoalHandle& handle) {
      auto [it, fresh] = remaining->try_emplace(handle.id(), get_i64(handle.goal(), "from"));
      if (handle.canceling()) {
        remaining->erase(it);
        return rpc::GoalStepResult::ConfirmCanceled;
      }
      if (it->second <= 0) {
        MessageValue result(res_t);
        (void)result.set("final", Value(Primitive(int64_t{0})));
        handle.set_result(std::move(result));
        remaining->erase(it);
        return rpc::GoalStepResult::Succeed;
      }
      MessageValue fb(fb_t);
      (void)fb.set("remaining", Value(Primitive(it->second)));
      (void)handle.publish_feedback(fb);
      --it->second;
      return rpc::GoalStepResult::Continue;
    };
    auto srv = node.value()->create_action_server("countdown", goal_t, fb_t, res_t,
                                                  std::move(callbacks));
    if (!srv.ok()) return srv.error();
    return node;
  });
}

}  // namespace mbus::core
