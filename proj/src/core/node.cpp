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

#include "mbus/core/node.hpp"

#include "mbus/core/context.hpp"

namespace mbus::core {

namespace {

bool valid_name_token(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

bool valid_namespace(const std::string& ns) {
  if (ns == "/") return true;
  if (ns.empty() || ns[0] != '/' || ns.back() == '/') return false;
  size_t start = 1;
  while (start <= ns.size()) {
    size_t end = ns.find('/', start);
    if (end == std::string::npos) end = ns.size();
    if (!valid_name_token(ns.substr(start, end - start))) return false;
    start = end + 1;
  }
  return true;
}

}  // namespace

Node::Node(Context& ctx, std::string name, std::string ns)
    : ctx_(ctx), name_(std::move(name)), namespace_(std::move(ns)) {
  if (!valid_name_token(name_) || !valid_namespace(namespace_)) return;  // fqn_ stays empty
  fqn_ = namespace_ == "/" ? "/" + name_ : namespace_ + "/" + name_;
}

std::string Node::resolve(const std::string& name) const {
  if (name.empty()) return name;
  if (name[0] == '/') return name;
  if (name.rfind("~/", 0) == 0) return fqn_ + "/" + name.substr(2);
  if (name == "~") return fqn_;
  return (namespace_ == "/" ? "" : namespace_) + "/" + name;
}

Result<std::shared_ptr<Publisher>> Node::create_publisher(const std::string& topic,
                                                          interfaces::TypeDescriptorPtr type,
                                                          transport::QosProfile qos,
                                                          PublisherOptions opts) {
  if (!type) return Error{Errc::validation_error, "null type descriptor"};
  std::string type_name = type->name();
  uint64_t type_hash = type->hash();
  return create_raw_publisher_impl(topic, type_name, type_hash, std::move(type), qos,
                                   std::move(opts));
}

Result<std::shared_ptr<Publisher>> Node::create_raw_publisher(const std::string& topic,
                                                              const std::string& type_name,
                                                              uint64_t type_hash,
                                                              transport::QosProfile qos,
                                                              PublisherOptions opts) {
  return create_raw_publisher_impl(topic, type_name, type_hash, nullptr, qos, std::move(opts));
}

Result<std::shared_ptr<Publisher>> Node::create_raw_publisher_impl(
    const std::string& topic, const std::string& type_name, uint64_t type_hash,
    interfaces::TypeDescriptorPtr type, transport::QosProfile qos, PublisherOptions opts) {
  if (destroyed_) return Error{Errc::unavailable, "node destroyed"};
  if (topic.empty()) return Error{Errc::validation_error, "empty topic"};
  if (auto st = transport::validate_qos(qos); !st.ok()) return st.error();
  std::string resolved = resolve(topic);

  const auto& cfg = ctx_.config();
  if (cfg.security && cfg.security_enforce_local) {
    const auto& perms = ctx_.security_engine()->identity().permissions;
    if (!security::authorize(perms, security::RuleDirection::Pub, resolved))
      return Error{Errc::access_denied, "permissions deny publishing on " + resolved};
  }

  transport::WriterConfig wcfg;
  wcfg.max_fragment = cfg.max_fragment;
  wcfg.keep_all_high_water = cfg.keep_all_high_water;
  wcfg.heartbeat_period = cfg.heartbeat_period;

  auto pub = std::shared_ptr<Publisher>(
      new Publisher(ctx_, *this, resolved, type_name, type_hash, std::move(type), qos,
                    ctx_.next_endpoint_guid(), wcfg, std::move(opts)));
  if (auto st = ctx_.register_publisher(pub); !st.ok()) return st.error();
  publishers_.push_back(pub);
  return pub;
}

Result<std::shared_ptr<Subscription>> Node::create_subscription(
    const std::string& topic, interfaces::TypeDescriptorPtr type, transport::QosProfile qos,
    MessageCallback callback, SubscriptionOptions opts) {
  if (!type) return Error{Errc::validation_error, "null type descriptor"};
  std::string type_name = type->name();
  uint64_t type_hash = type->hash();
  return create_raw_subscription_impl(topic, type_name, type_hash, std::move(type), qos,
                                      std::move(callback), nullptr, std::move(opts));
}

Result<std::shared_ptr<Subscription>> Node::create_raw_subscription(
    const std::string& topic, const std::string& type_name, uint64_t type_hash,
    transport::QosProfile qos, RawMessageCallback callback, SubscriptionOptions opts) {
  return create_raw_subscription_impl(topic, type_name, type_hash, nullptr, qos, nullptr,
                                      std::move(callback), std::move(opts));
}

Result<std::shared_ptr<Subscription>> Node::create_raw_subscription_impl(
    const std::string& topic, const std::string& type_name, uint64_t type_hash,
    interfaces::TypeDescriptorPtr type, transport::QosProfile qos, MessageCallback callback,
    RawMessageCallback raw_callback, SubscriptionOptions opts) {
  if (destroyed_) return Error{Errc::unavailable, "node destroyed"};
  if (topic.empty()) return Error{Errc::validation_error, "empty topic"};
  if (auto st = transport::validate_qos(qos); !st.ok()) return st.error();
  std::string resolved = resolve(topic);

  const auto& cfg = ctx_.config();
  if (cfg.security && cfg.security_enforce_local) {
    const auto& perms = ctx_.security_engine()->identity().permissions;
    if (!security::authorize(perms, security::RuleDirection::Sub, resolved))
      return Error{Errc::access_denied, "permissions deny subscribing on " + resolved};
  }

  transport::ReaderConfig rcfg;
  rcfg.reassembly_timeout = cfg.reassembly_timeout;

  auto sub = std::shared_ptr<Subscription>(new Subscription(
      ctx_, *this, resolved, type_name, type_hash, std::move(type), qos,
      ctx_.next_endpoint_guid(), rcfg, std::move(callback), std::move(raw_callback),
      std::move(opts)));
  if (auto st = ctx_.register_subscription(sub); !st.ok()) return st.error();
  subscriptions_.push_back(sub);
  return sub;
}

Result<std::shared_ptr<Timer>> Node::create_timer(Duration period,
                                                  std::function<void()> callback) {
  if (destroyed_) return Error{Errc::unavailable, "node destroyed"};
  if (period <= Duration::zero())
    return Error{Errc::validation_error, "timer period must be positive"};
  auto timer = std::shared_ptr<Timer>(
      new Timer(*this, period, std::move(callback), ctx_.clock().now() + period));
  ctx_.timers_.push_back(timer);
  timers_.push_back(timer);
  return timer;
}

Status Node::make_managed(mgmt::LifecycleHooks hooks) {
  if (managed_) return Error{Errc::validation_error, "node already managed"};
  managed_ = true;
  hooks_ = std::move(hooks);
  install_lifecycle_builtins(*this);
  return {};
}

Result<mgmt::LifecycleState> Node::trigger_transition(mgmt::TransitionRequest request) {
  if (!managed_) return Error{Errc::validation_error, "node is not managed"};
  if (!mgmt::transition_allowed(lifecycle_state_, request))
    return mgmt::lifecycle_transition(lifecycle_state_, request, mgmt::HookResult::Success);
  mgmt::HookResult outcome = hooks_.run(request);
  auto next = mgmt::lifecycle_transition(lifecycle_state_, request, outcome);
  if (!next.ok()) return next;
  mgmt::LifecycleState previous = lifecycle_state_;
  lifecycle_state_ = next.value();
  if (lifecycle_state_ != previous) publish_lifecycle_event(previous);
  return next;
}

uint64_t Node::inactive_publish_drops() const {
  uint64_t total = 0;
  for (const auto& pub : publishers_) total += pub->inactive_drops();
  return total;
}

Status Node::declare_parameter(mgmt::ParameterRecord record) {
  std::string name = record.name;
  if (auto st = params_.declare(std::move(record)); !st.ok()) return st;
  publish_parameter_event(name, /*op=*/0);
  return {};
}

Result<mgmt::ParameterValue> Node::get_parameter(const std::string& name) const {
  return params_.get(name);
}

Status Node::set_parameter(const std::string& name, mgmt::ParameterValue value) {
  if (auto st = params_.set(name, std::move(value)); !st.ok()) return st;
  publish_parameter_event(name, /*op=*/1);
  return {};
}

Result<mgmt::ParameterRecord> Node::describe_parameter(const std::string& name) const {
  return params_.describe(name);
}

std::vector<std::string> Node::list_parameters(const std::string& prefix) const {
  return params_.list(prefix);
}

void Node::destroy() {
  if (destroyed_) return;
  destroyed_ = true;
  for (auto& pub : publishers_) pub->destroy();
  for (auto& sub : subscriptions_) sub->destroy();
  for (auto& timer : timers_) timer->cancel();
  services_.clear();
  ctx_.unregister_node(fqn_);
}

}  // namespace mbus::core
