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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mbus/core/sim_network.hpp"
#include "mbus/interfaces/schema.hpp"
#include "mbus/mgmt/lifecycle.hpp"
#include "mbus/mgmt/parameters.hpp"
#include "mbus/rpc/service.hpp"

using namespace mbus;
using namespace mbus::core;
using namespace mbus::mgmt;
using namespace std::chrono_literals;
using interfaces::MessageValue;
using interfaces::Primitive;
using interfaces::Value;

namespace {

const interfaces::SchemaRegistry& schemas() {
  static const auto reg = interfaces::builtin_schemas();
  return reg;
}

ContextConfig sim_cfg() {
  ContextConfig cfg;
  cfg.burst_interval = Duration::zero();
  return cfg;
}

std::string get_str(const MessageValue& m, const char* field) {
  return std::get<std::string>(std::get<Primitive>(m.get(field)->data));
}
uint8_t get_u8(const MessageValue& m, const char* field) {
  return std::get<uint8_t>(std::get<Primitive>(m.get(field)->data));
}

}  // namespace

TEST_CASE("lifecycle machine equals the committed golden table, exhaustively") {
  std::ifstream golden(std::string(MBUS_TEST_DATA_DIR) + "/lifecycle_transitions.golden");
  REQUIRE(golden.good());
  std::string line;
  size_t rows = 0;
  while (std::getline(golden, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string state_s, req_s, hook_s, arrow, outcome_s;
    row >> state_s >> req_s >> hook_s >> arrow >> outcome_s;
    auto state = lifecycle_state_from_name(state_s);
    auto req = transition_request_from_name(req_s);
    REQUIRE(state);
    REQUIRE(req);
    HookResult hook = hook_s == "SUCCESS" ? HookResult::Success : HookResult::Failure;
    auto result = lifecycle_transition(*state, *req, hook);
    INFO(line);
    if (outcome_s == "REJECT") {
      REQUIRE(!result.ok());
      CHECK(result.error().code == Errc::transition_invalid);
    } else {
      auto expected = lifecycle_state_from_name(outcome_s);
      REQUIRE(expected);
      REQUIRE(result.ok());
      CHECK(result.value() == *expected);
    }
    ++rows;
  }
  CHECK(rows == 40);  // 4 states x 5 requests x 2 hook outcomes
}

TEST_CASE("paper-named transitions drive a managed node through its states") {
  SimNetwork net;
  auto ctx = net.create_context(sim_cfg()).value();
  auto node = ctx->create_node("managed").value();
  REQUIRE(node->make_managed({}).ok());
  CHECK(node->lifecycle_state() == LifecycleState::Unconfigured);

  CHECK(node->trigger_transition(TransitionRequest::Configure).value() ==
        LifecycleState::Inactive);
  CHECK(node->trigger_transition(TransitionRequest::Activate).value() ==
        LifecycleState::Active);
  CHECK(node->trigger_transition(TransitionRequest::Deactivate).value() ==
        LifecycleState::Inactive);
  CHECK(node->trigger_transition(TransitionRequest::Cleanup).value() ==
        LifecycleState::Unconfigured);
  // illegal from UNCONFIGURED
  CHECK(node->trigger_transition(TransitionRequest::Activate).error().code ==
        Errc::transition_invalid);
  CHECK(node->trigger_transition(TransitionRequest::Shutdown).value() ==
        LifecycleState::Finalized);
  CHECK(node->trigger_transition(TransitionRequest::Configure).error().code ==
        Errc::transition_invalid);
}

TEST_CASE("hook failure keeps the origin state") {
  SimNetwork net;
  auto ctx = net.create_context(sim_cfg()).value();
  auto node = ctx->create_node("managed").value();
  LifecycleHooks hooks;
  int attempts = 0;
  hooks.on_configure = [&attempts]() {
    return ++attempts < 2 ? HookResult::Failure : HookResult::Success;
  };
  REQUIRE(node->make_managed(std::move(hooks)).ok());

  auto first = node->trigger_transition(TransitionRequest::Configure);
  REQUIRE(first.ok());
  CHECK(first.value() == LifecycleState::Unconfigured);  // failed hook: stayed

  auto second = node->trigger_transition(TransitionRequest::Configure);
  REQUIRE(second.ok());
  CHECK(second.value() == LifecycleState::Inactive);
}

TEST_CASE("publish while INACTIVE drops silently into the counter; ACTIVE flows") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("managed_talker").value();
  REQUIRE(node->make_managed({}).ok());
  auto pub = node->create_publisher("gated", schemas().find("demo/Value"),
                                    transport::QosProfile::reliable_keep_last(8))
                 .value();
  size_t heard = 0;
  auto sub = b->create_node("listener").value()
                 ->create_subscription("gated", schemas().find("demo/Value"),
                                       transport::QosProfile::reliable_keep_last(8),
                                       [&heard](const MessageValue&, const MessageInfo&) {
                                         ++heard;
                                       })
                 .value();
  REQUIRE(net.run_until([&] { return pub->matched_count() > 0; }, 3s));

  REQUIRE(node->trigger_transition(TransitionRequest::Configure).ok());  // INACTIVE
  MessageValue msg(schemas().find("demo/Value"));
  REQUIRE(pub->publish(msg).ok());
  REQUIRE(pub->publish(msg).ok());
  net.run_for(1s);
  CHECK(heard == 0);
  CHECK(node->inactive_publish_drops() == 2);

  REQUIRE(node->trigger_transition(TransitionRequest::Activate).ok());
  REQUIRE(pub->publish(msg).ok());
  REQUIRE(net.run_until([&] { return heard == 1; }, 2s));
  CHECK(node->inactive_publish_drops() == 2);
}

TEST_CASE("timers run only while ACTIVE") {
  SimNetwork net;
  auto ctx = net.create_context(sim_cfg()).value();
  auto node = ctx->create_node("managed").value();
  REQUIRE(node->make_managed({}).ok());
  int fired = 0;
  auto timer = node->create_timer(100ms, [&fired] { ++fired; }).value();

  net.run_for(500ms);
  CHECK(fired == 0);  // UNCONFIGURED

  REQUIRE(node->trigger_transition(TransitionRequest::Configure).ok());
  REQUIRE(node->trigger_transition(TransitionRequest::Activate).ok());
  net.run_for(1s);
  CHECK(fired >= 9);
  int after_active = fired;

  REQUIRE(node->trigger_transition(TransitionRequest::Deactivate).ok());
  net.run_for(500ms);
  CHECK(fired == after_active);
}

TEST_CASE("late monitor immediately receives the current lifecycle state") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("managed").value();
  REQUIRE(node->make_managed({}).ok());
  REQUIRE(node->trigger_transition(TransitionRequest::Configure).ok());
  REQUIRE(node->trigger_transition(TransitionRequest::Activate).ok());
  net.run_for(1500ms);

  // monitor joins after the transitions happened
  std::vector<std::pair<uint8_t, uint8_t>> events;
  auto sub = b->create_node("monitor").value()
                 ->create_subscription("/managed/lifecycle/events",
                                       schemas().find("mgmt/LifecycleEvent"),
                                       transport::QosProfile::transient_local(1),
                                       [&events](const MessageValue& m, const MessageInfo&) {
                                         events.emplace_back(get_u8(m, "previous"),
                                                             get_u8(m, "current"));
                                       })
                 .value();
  REQUIRE(net.run_until([&] { return !events.empty(); }, 5s));
  CHECK(events.back().second == static_cast<uint8_t>(LifecycleState::Active));
}

TEST_CASE("every successful transition produces exactly one lifecycle event") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("managed").value();

  std::vector<std::pair<uint8_t, uint8_t>> events;
  auto sub = b->create_node("monitor").value()
                 ->create_subscription("/managed/lifecycle/events",
                                       schemas().find("mgmt/LifecycleEvent"),
                                       transport::QosProfile::transient_local(8),
                                       [&events](const MessageValue& m, const MessageInfo&) {
                                         events.emplace_back(get_u8(m, "previous"),
                                                             get_u8(m, "current"));
                                       })
                 .value();
  REQUIRE(node->make_managed({}).ok());
  net.run_for(2s);
  size_t baseline = events.size();  // initial-state event

  REQUIRE(node->trigger_transition(TransitionRequest::Configure).ok());
  CHECK(!node->trigger_transition(TransitionRequest::Configure).ok());  // rejected: no event
  REQUIRE(node->trigger_transition(TransitionRequest::Activate).ok());
  net.run_for(2s);
  REQUIRE(events.size() == baseline + 2);
  CHECK(events[baseline] == std::make_pair(uint8_t{0}, uint8_t{1}));
  CHECK(events[baseline + 1] == std::make_pair(uint8_t{1}, uint8_t{2}));
}

TEST_CASE("parameters: declare, typed set/get, errors") {
  SimNetwork net;
  auto ctx = net.create_context(sim_cfg()).value();
  auto node = ctx->create_node("robot").value();

  ParameterRecord rec;
  rec.name = "max_speed";
  rec.declared_type = ParameterType::Float64;
  rec.value = 1.5;
  rec.description = "meters per second";
  REQUIRE(node->declare_parameter(rec).ok());

  // declare twice: conflict
  CHECK(node->declare_parameter(rec).code() == Errc::name_conflict);

  REQUIRE(node->set_parameter("max_speed", 2.0).ok());
  CHECK(std::get<double>(node->get_parameter("max_speed").value()) == 2.0);

  // set to a string: parameter-type error, value untouched
  CHECK(node->set_parameter("max_speed", std::string("fast")).code() == Errc::parameter_type);
  CHECK(std::get<double>(node->get_parameter("max_speed").value()) == 2.0);

  // undeclared access is an error, not auto-declaration
  CHECK(node->get_parameter("nope").code() == Errc::unknown_parameter);
  CHECK(node->set_parameter("nope", int64_t{1}).code() == Errc::unknown_parameter);

  // read-only refuses writes
  ParameterRecord ro;
  ro.name = "serial";
  ro.declared_type = ParameterType::String;
  ro.value = std::string("X-99");
  ro.read_only = true;
  REQUIRE(node->declare_parameter(ro).ok());
  CHECK(node->set_parameter("serial", std::string("other")).code() == Errc::read_only);

  ParameterRecord arr;
  arr.name = "waypoints.x";
  arr.declared_type = ParameterType::Float64Array;
  arr.value = std::vector<double>{1.0, 2.0};
  REQUIRE(node->declare_parameter(arr).ok());
  auto names = node->list_parameters("waypoints.");
  CHECK(names == std::vector<std::string>{"waypoints.x"});
  CHECK(node->list_parameters().size() == 3);
}

TEST_CASE("parameter type preservation under randomized set sequences") {
  std::mt19937_64 rng(4242);
  ParameterStore store;
  const std::vector<ParameterType> kTypes = {
      ParameterType::Bool,      ParameterType::Int64,      ParameterType::Float64,
      ParameterType::String,    ParameterType::ByteArray,  ParameterType::BoolArray,
      ParameterType::Int64Array, ParameterType::Float64Array, ParameterType::StringArray};

  auto random_value = [&rng](ParameterType t) -> ParameterValue {
    switch (t) {
      case ParameterType::Bool: return (rng() & 1) != 0;
      case ParameterType::Int64: return static_cast<int64_t>(rng());
      case ParameterType::Float64: return static_cast<double>(rng() % 1000) / 7.0;
      case ParameterType::String: return std::string("s") + std::to_string(rng() % 100);
      case ParameterType::ByteArray:
        return std::vector<uint8_t>{static_cast<uint8_t>(rng()), static_cast<uint8_t>(rng())};
      case ParameterType::BoolArray: return std::vector<bool>{(rng() & 1) != 0};
      case ParameterType::Int64Array:
        return std::vector<int64_t>{static_cast<int64_t>(rng() % 50)};
      case ParameterType::Float64Array: return std::vector<double>{1.0, 2.0};
      case ParameterType::StringArray: return std::vector<std::string>{"a", "b"};
    }
    return false;
  };

  for (size_t i = 0; i < kTypes.size(); ++i) {
    ParameterRecord rec;
    rec.name = "p" + std::to_string(i);
    rec.declared_type = kTypes[i];
    rec.value = random_value(kTypes[i]);
    REQUIRE(store.declare(std::move(rec)).ok());
  }

  for (int step = 0; step < 5000; ++step) {
    size_t target = rng() % kTypes.size();
    ParameterType value_type = kTypes[rng() % kTypes.size()];
    std::string name = "p" + std::to_string(target);
    auto st = store.set(name, random_value(value_type));
    CHECK(st.ok() == (value_type == kTypes[target]));
    // invariant: stored kind always equals declared kind
    auto current = store.get(name);
    REQUIRE(current.ok());
    REQUIRE(parameter_type_of(current.value()) == kTypes[target]);
  }
}

TEST_CASE("parameter value wire round trip covers every type") {
  std::vector<ParameterValue> values = {
      true,
      int64_t{-7},
      3.25,
      std::string("hello"),
      std::vector<uint8_t>{1, 2, 3},
      std::vector<bool>{true, false, true},
      std::vector<int64_t>{5, -6},
      std::vector<double>{0.5, 1.5},
      std::vector<std::string>{"x", "", "yz"},
  };
  for (const auto& v : values) {
    auto bytes = parameter_value_bytes(v);
    auto back = parameter_value_from_bytes(bytes);
    REQUIRE(back.ok());
    CHECK(back.value() == v);
  }
  CHECK(!parameter_value_from_bytes(Bytes{0xFF}).ok());
  CHECK(!parameter_value_from_bytes(Bytes{}).ok());
}

TEST_CASE("remote parameter services agree with local state") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("robot").value();
  ParameterRecord rec;
  rec.name = "max_speed";
  rec.declared_type = ParameterType::Float64;
  rec.value = 1.5;
  REQUIRE(node->declare_parameter(rec).ok());

  auto caller = b->create_node("tool").value();
  auto set_client = caller
                        ->create_client("/robot/param/set", schemas().find("mgmt/ParamSetRequest"),
                                        schemas().find("mgmt/ParamSetResponse"))
                        .value();
  auto get_client = caller
                        ->create_client("/robot/param/get", schemas().find("mgmt/ParamGetRequest"),
                                        schemas().find("mgmt/ParamGetResponse"))
                        .value();

  // remote set 2.0
  MessageValue set_req(schemas().find("mgmt/ParamSetRequest"));
  REQUIRE(set_req.set("name", Value(Primitive(std::string("max_speed")))).ok());
  auto blob = parameter_value_bytes(ParameterValue(2.0));
  REQUIRE(set_req.set("value", Value(Primitive(std::string(blob.begin(), blob.end())))).ok());
  std::optional<bool> set_ok;
  REQUIRE(set_client
              ->async_call(set_req,
                           [&set_ok](Result<MessageValue> resp) {
                             REQUIRE(resp.ok());
                             set_ok = get_u8(resp.value(), "ok") == 1;
                           })
              .ok());
  REQUIRE(net.run_until([&] { return set_ok.has_value(); }, 6s));
  CHECK(*set_ok);
  CHECK(std::get<double>(node->get_parameter("max_speed").value()) == 2.0);

  // remote get sees the same value
  MessageValue get_req(schemas().find("mgmt/ParamGetRequest"));
  REQUIRE(get_req.set("name", Value(Primitive(std::string("max_speed")))).ok());
  std::optional<double> got;
  REQUIRE(get_client
              ->async_call(get_req,
                           [&got](Result<MessageValue> resp) {
                             REQUIRE(resp.ok());
                             REQUIRE(get_u8(resp.value(), "ok") == 1);
                             std::string blob = get_str(resp.value(), "value");
                             auto v = parameter_value_from_bytes(
                                 Bytes(blob.begin(), blob.end()));
                             REQUIRE(v.ok());
                             got = std::get<double>(v.value());
                           })
              .ok());
  REQUIRE(net.run_until([&] { return got.has_value(); }, 6s));
  CHECK(*got == 2.0);

  // remote type mismatch is refused and reported
  MessageValue bad_req(schemas().find("mgmt/ParamSetRequest"));
  REQUIRE(bad_req.set("name", Value(Primitive(std::string("max_speed")))).ok());
  auto bad_blob = parameter_value_bytes(ParameterValue(std::string("fast")));
  REQUIRE(bad_req.set("value",
                      Value(Primitive(std::string(bad_blob.begin(), bad_blob.end()))))
              .ok());
  std::optional<bool> bad_ok;
  REQUIRE(set_client
              ->async_call(bad_req,
                           [&bad_ok](Result<MessageValue> resp) {
                             REQUIRE(resp.ok());
                             bad_ok = get_u8(resp.value(), "ok") == 1;
                           })
              .ok());
  REQUIRE(net.run_until([&] { return bad_ok.has_value(); }, 6s));
  CHECK(!*bad_ok);
  CHECK(std::get<double>(node->get_parameter("max_speed").value()) == 2.0);
}

TEST_CASE("remote lifecycle services drive transitions") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("managed").value();
  REQUIRE(node->make_managed({}).ok());

  auto caller = b->create_node("tool").value();
  auto change = caller
                    ->create_client("/managed/lifecycle/change_state",
                                    schemas().find("mgmt/ChangeStateRequest"),
                                    schemas().find("mgmt/ChangeStateResponse"))
                    .value();
  auto get = caller
                 ->create_client("/managed/lifecycle/get_state",
                                 schemas().find("mgmt/GetStateRequest"),
                                 schemas().find("mgmt/GetStateResponse"))
                 .value();

  MessageValue req(schemas().find("mgmt/ChangeStateRequest"));
  REQUIRE(req.set("transition",
                  Value(Primitive(static_cast<uint8_t>(TransitionRequest::Configure))))
              .ok());
  std::optional<uint8_t> new_state;
  REQUIRE(change
              ->async_call(req,
                           [&new_state](Result<MessageValue> resp) {
                             REQUIRE(resp.ok());
                             REQUIRE(get_u8(resp.value(), "ok") == 1);
                             new_state = get_u8(resp.value(), "state");
                           })
              .ok());
  REQUIRE(net.run_until([&] { return new_state.has_value(); }, 6s));
  CHECK(*new_state == static_cast<uint8_t>(LifecycleState::Inactive));
  CHECK(node->lifecycle_state() == LifecycleState::Inactive);

  std::optional<uint8_t> remote_state;
  REQUIRE(get->async_call(MessageValue(schemas().find("mgmt/GetStateRequest")),
                          [&remote_state](Result<MessageValue> resp) {
                            REQUIRE(resp.ok());
                            remote_state = get_u8(resp.value(), "state");
                          })
              .ok());
  REQUIRE(net.run_until([&] { return remote_state.has_value(); }, 6s));
  CHECK(*remote_state == static_cast<uint8_t>(LifecycleState::Inactive));
}

TEST_CASE("parameter events are published on /parameter_events") {
  SimNetwork net;
  auto a = net.create_context(sim_cfg()).value();
  auto b = net.create_context(sim_cfg()).value();
  auto node = a->create_node("robot").value();

  std::vector<std::pair<std::string, uint8_t>> seen;  // (name, op)
  auto sub = b->create_node("watcher").value()
                 ->create_subscription("/parameter_events",
                                       schemas().find("mgmt/ParameterEvent"),
                                       transport::QosProfile::reliable_keep_last(32),
                                       [&seen](const MessageValue& m, const MessageInfo&) {
                                         seen.emplace_back(get_str(m, "name"),
                                                           get_u8(m, "op"));
                                       })
                 .value();
  net.run_for(1500ms);

  ParameterRecord rec;
  rec.name = "gain";
  rec.declared_type = ParameterType::Int64;
  rec.value = int64_t{1};
  REQUIRE(node->declare_parameter(rec).ok());
  REQUIRE(node->set_parameter("gain", int64_t{5}).ok());
  REQUIRE(net.run_until([&] { return seen.size() >= 2; }, 5s));
  CHECK(seen[0] == std::make_pair(std::string("gain"), uint8_t{0}));  // declared
  CHECK(seen[1] == std::make_pair(std::string("gain"), uint8_t{1}));  // changed
}
