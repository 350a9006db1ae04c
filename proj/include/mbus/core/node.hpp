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

#include <memory>
#include <string>
#include <vector>

#include "mbus/core/publisher.hpp"
#include "mbus/core/subscription.hpp"
#include "mbus/core/timer.hpp"
#include "mbus/mgmt/lifecycle.hpp"
#include "mbus/mgmt/parameters.hpp"
#include "mbus/rpc/types.hpp"

namespace mbus::core {

class Context;

/// The organizational unit: owns endpoints, timers and parameters within a
/// participant. Endpoints die with their node. Managed (lifecycle) nodes gate
/// publishing and timers on the ACTIVE state.
class Node : public std::enable_shared_from_this<Node> {
 public:
  const std::string& name() const { return name_; }
  const std::string& ns() const { return namespace_; }
  const std::string& fqn() const { return fqn_; }
  Context& context() { return ctx_; }

  /// Name resolution: absolute "/x" stays; "~/x" prefixes the node FQN;
  /// relative "x" prefixes the namespace.
  std::string resolve(const std::string& name) const;

  Result<std::shared_ptr<Publisher>> create_publisher(const std::string& topic,
                                                      interfaces::TypeDescriptorPtr type,
                                                      transport::QosProfile qos,
                                                      PublisherOptions opts = {});
  Result<std::shared_ptr<Subscription>> create_subscription(const std::string& topic,
                                                            interfaces::TypeDescriptorPtr type,
                                                            transport::QosProfile qos,
                                                            MessageCallback callback,
                                                            SubscriptionOptions opts = {});

  /// Raw endpoints carry opaque payloads under an explicit (type name, hash):
  /// recording and replay of types this process cannot decode.
  Result<std::shared_ptr<Publisher>> create_raw_publisher(const std::string& topic,
                                                          const std::string& type_name,
                                                          uint64_t type_hash,
                                                          transport::QosProfile qos,
                                                          PublisherOptions opts = {});
  Result<std::shared_ptr<Subscription>> create_raw_subscription(
      const std::string& topic, const std::string& type_name, uint64_t type_hash,
      transport::QosProfile qos, RawMessageCallback callback, SubscriptionOptions opts = {});

  Result<std::shared_ptr<Timer>> create_timer(Duration period, std::function<void()> callback);

  // Services and actions (implemented by the rpc module).
  Result<std::shared_ptr<rpc::ServiceServer>> create_service(
      const std::string& service, interfaces::TypeDescriptorPtr request_type,
      interfaces::TypeDescriptorPtr response_type, rpc::ServiceHandler handler);
  Result<std::shared_ptr<rpc::ServiceClient>> create_client(
      const std::string& service, interfaces::TypeDescriptorPtr request_type,
      interfaces::TypeDescriptorPtr response_type);
  Result<std::shared_ptr<rpc::ActionServer>> create_action_server(
      const std::string& action, interfaces::TypeDescriptorPtr goal_type,
      interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type,
      rpc::ActionServerCallbacks callbacks);
  Result<std::shared_ptr<rpc::ActionClient>> create_action_client(
      const std::string& action, interfaces::TypeDescriptorPtr goal_type,
      interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type);

  // Lifecycle management (mgmt module wires the services and event topic).
  Status make_managed(mgmt::LifecycleHooks hooks);
  bool managed() const { return managed_; }
  mgmt::LifecycleState lifecycle_state() const { return lifecycle_state_; }
  Result<mgmt::LifecycleState> trigger_transition(mgmt::TransitionRequest request);
  uint64_t inactive_publish_drops() const;

  // Parameters: declared and type-enforced; mirrored as ~/param/* services.
  Status declare_parameter(mgmt::ParameterRecord record);
  Result<mgmt::ParameterValue> get_parameter(const std::string& name) const;
  Status set_parameter(const std::string& name, mgmt::ParameterValue value);
  Result<mgmt::ParameterRecord> describe_parameter(const std::string& name) const;
  std::vector<std::string> list_parameters(const std::string& prefix = "") const;

  /// Removes the node and everything it owns from the graph.
  void destroy();
  bool destroyed() const { return destroyed_; }

 private:
  friend class Context;
  friend void install_node_builtins(Node& node);
  friend void install_lifecycle_builtins(Node& node);

  Node(Context& ctx, std::string name, std::string ns);

  Result<std::shared_ptr<Publisher>> create_raw_publisher_impl(
      const std::string& topic, const std::string& type_name, uint64_t type_hash,
      interfaces::TypeDescriptorPtr type, transport::QosProfile qos, PublisherOptions opts);
  Result<std::shared_ptr<Subscription>> create_raw_subscription_impl(
      const std::string& topic, const std::string& type_name, uint64_t type_hash,
      interfaces::TypeDescriptorPtr type, transport::QosProfile qos, MessageCallback callback,
      RawMessageCallback raw_callback, SubscriptionOptions opts);

  // Defined with the builtin-service wiring in the mgmt module.
  void publish_lifecycle_event(mgmt::LifecycleState previous);
  void publish_parameter_event(const std::string& name, uint8_t op);

  Context& ctx_;
  std::string name_;
  std::string namespace_;
  std::string fqn_;

  bool managed_ = false;
  mgmt::LifecycleState lifecycle_state_ = mgmt::LifecycleState::Unconfigured;
  mgmt::LifecycleHooks hooks_;
  std::shared_ptr<Publisher> lifecycle_events_pub_;

  mgmt::ParameterStore params_;
  std::shared_ptr<Publisher> param_events_pub_;

  std::vector<std::shared_ptr<Publisher>> publishers_;
  std::vector<std::shared_ptr<Subscription>> subscriptions_;
  std::vector<std::shared_ptr<Timer>> timers_;
  std::vector<std::shared_ptr<void>> services_;  // keeps rpc objects alive
  bool destroyed_ = false;
};

/// Installed for every node: ~/param/get|set|list|describe services and the
/// /parameter_events publisher. Defined in the mgmt module.
void install_node_builtins(Node& node);

/// Installed when a node becomes managed: ~/lifecycle/change_state and
/// ~/lifecycle/get_state services plus the ~/lifecycle/events topic
/// (TRANSIENT_LOCAL KEEP_LAST(1), so late monitors see the current state).
void install_lifecycle_builtins(Node& node);

}  // namespace mbus::core
