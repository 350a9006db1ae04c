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

#include "mbus/rpc/action.hpp"

#include "mbus/core/context.hpp"

namespace mbus::rpc {

namespace {

using namespace std::chrono_literals;

transport::QosProfile feedback_qos() {
  transport::QosProfile q;
  q.history = transport::History::KeepAll;  // reliable, ordered, complete
  return q;
}

transport::QosProfile status_qos() {
  return transport::QosProfile::reliable_keep_last(32);
}

Bytes frame_goal_id(const GoalId& id) {
  return Bytes(id.bytes.begin(), id.bytes.end());
}

std::optional<GoalId> read_goal_id(BytesView payload) {
  if (payload.size() < 16) return std::nullopt;
  GoalId id;
  std::memcpy(id.bytes.data(), payload.data(), 16);
  return id;
}

// result response codes
constexpr uint8_t kResultReady = 0;
constexpr uint8_t kResultNotReady = 1;
constexpr uint8_t kResultUnknown = 2;

}  // namespace

const char* cancel_outcome_name(CancelOutcome o) {
  switch (o) {
    case CancelOutcome::Accepted: return "ACCEPTED";
    case CancelOutcome::Declined: return "DECLINED";
    case CancelOutcome::AlreadyTerminal: return "ALREADY_TERMINAL";
    case CancelOutcome::UnknownGoal: return "UNKNOWN_GOAL";
  }
  return "?";
}

namespace detail {

ActionTopicInfo action_topics(const std::string& resolved_action, uint64_t goal_type_hash,
                              uint64_t feedback_type_hash, uint64_t result_type_hash) {
  ByteWriter w(24);
  w.u64(goal_type_hash);
  w.u64(feedback_type_hash);
  w.u64(result_type_hash);
  uint64_t action_hash = interfaces::fnv1a64(BytesView(w.data()));
  auto role_hash = [action_hash](const char* role) {
    ByteWriter rw(24);
    rw.u64(action_hash);
    rw.raw(role, strlen(role));
    return interfaces::fnv1a64(BytesView(rw.data()));
  };
  ActionTopicInfo info;
  info.goal_service = resolved_action + "/goal";
  info.cancel_service = resolved_action + "/cancel";
  info.result_service = resolved_action + "/result";
  info.feedback_topic = resolved_action + "/feedback";
  info.status_topic = resolved_action + "/status";
  info.goal_hash = role_hash("goal");
  info.cancel_hash = role_hash("cancel");
  info.result_hash = role_hash("result");
  info.feedback_hash = role_hash("feedback");
  info.status_hash = role_hash("status");
  return info;
}

}  // namespace detail

// ------------------------------------------------------------- server -----

Result<std::shared_ptr<ActionServer>> ActionServer::create(
    core::Node& node, const std::string& action, interfaces::TypeDescriptorPtr goal_type,
    interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type,
    ActionServerCallbacks callbacks) {
  auto server = std::shared_ptr<ActionServer>(new ActionServer());
  server->action_ = node.resolve(action);
  server->ctx_ = &node.context();
  server->goal_type_ = std::move(goal_type);
  server->feedback_type_ = std::move(feedback_type);
  server->result_type_ = std::move(result_type);
  server->callbacks_ = std::move(callbacks);

  auto topics = detail::action_topics(server->action_, server->goal_type_->hash(),
                                      server->feedback_type_->hash(),
                                      server->result_type_->hash());

  core::PublisherOptions sys_pub;
  sys_pub.system = true;
  auto fb = node.create_raw_publisher(topics.feedback_topic,
                                      server->feedback_type_->name() + "#feedback",
                                      topics.feedback_hash, feedback_qos(), sys_pub);
  if (!fb.ok()) return fb.error();
  server->feedback_pub_ = fb.value();

  auto st = node.create_raw_publisher(topics.status_topic, "action/Status",
                                      topics.status_hash, status_qos(), sys_pub);
  if (!st.ok()) return st.error();
  server->status_pub_ = st.value();

  std::weak_ptr<ActionServer> weak = server;
  auto goal_srv = detail::RawServiceServer::create(
      node, topics.goal_service, server->goal_type_->name() + "#goal", topics.goal_hash,
      topics.goal_hash, [weak](BytesView body) -> Result<Bytes> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "action server gone"};
        return self->on_goal_request(body);
      });
  if (!goal_srv.ok()) return goal_srv.error();
  server->goal_srv_ = goal_srv.value();

  auto cancel_srv = detail::RawServiceServer::create(
      node, topics.cancel_service, "action/Cancel", topics.cancel_hash, topics.cancel_hash,
      [weak](BytesView body) -> Result<Bytes> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "action server gone"};
        return self->on_cancel_request(body);
      });
  if (!cancel_srv.ok()) return cancel_srv.error();
  server->cancel_srv_ = cancel_srv.value();

  auto result_srv = detail::RawServiceServer::create(
      node, topics.result_service, server->result_type_->name() + "#result",
      topics.result_hash, topics.result_hash, [weak](BytesView body) -> Result<Bytes> {
        auto self = weak.lock();
        if (!self) return Error{Errc::unavailable, "action server gone"};
        return self->on_result_request(body);
      });
  if (!result_srv.ok()) return result_srv.error();
  server->result_srv_ = result_srv.value();
  return server;
}

size_t ActionServer::active_goals() const {
  size_t n = 0;
  for (const auto& [id, goal] : goals_) n += !goal_terminal(goal.state);
  return n;
}

void ActionServer::publish_status(const Goal& goal) {
  ByteWriter w(17);
  w.raw(goal.id.bytes.data(), 16);
  w.u8(static_cast<uint8_t>(goal.state));
  (void)status_pub_->publish_serialized(w.take());
}

void ActionServer::apply_transition(Goal& goal, GoalEvent event) {
  auto next = goal_transition(goal.state, event);
  if (!next.ok()) return;
  goal.state = next.value();
  goal.transition_times[goal.state] = ctx_->clock().now();
  publish_status(goal);
}

Result<Bytes> ActionServer::on_goal_request(BytesView body) {
  auto id = read_goal_id(body);
  if (!id) return Error{Errc::decode_error, "missing goal id"};
  auto goal_msg = interfaces::deserialize(body.subspan(16), goal_type_);
  if (!goal_msg.ok()) return goal_msg.error();

  bool accept = !callbacks_.accept || callbacks_.accept(goal_msg.value());
  ByteWriter resp(1);
  resp.u8(accept ? 1 : 0);
  if (!accept) {
    ++goals_rejected_;
    return resp.take();
  }
  ++goals_accepted_;
  Goal goal;
  goal.id = *id;
  goal.state = GoalState::Accepted;
  goal.goal_msg = std::make_shared<interfaces::MessageValue>(std::move(goal_msg.value()));
  goal.transition_times[GoalState::Accepted] = ctx_->clock().now();
  auto [it, fresh] = goals_.emplace(*id, std::move(goal));
  if (!fresh) return Error{Errc::name_conflict, "goal id already known"};
  publish_status(it->second);

  // first work item promotes ACCEPTED -> EXECUTING, then stepping begins
  GoalId gid = *id;
  std::weak_ptr<ActionServer> weak = weak_from_this();
  ctx_->post_work(core::WorkKind::GoalWork, [weak, gid]() {
    auto self = weak.lock();
    if (!self) return false;
    auto git = self->goals_.find(gid);
    if (git == self->goals_.end()) return false;
    self->apply_transition(git->second, GoalEvent::Execute);
    self->schedule_step(gid);
    return true;
  });
  return resp.take();
}

void ActionServer::schedule_step(const GoalId& id) {
  std::weak_ptr<ActionServer> weak = weak_from_this();
  ctx_->post_work(core::WorkKind::GoalWork, [weak, id]() {
    auto self = weak.lock();
    if (!self) return false;
    auto it = self->goals_.find(id);
    if (it == self->goals_.end() || goal_terminal(it->second.state)) return false;
    Goal& goal = it->second;
    ServerGoalHandle handle(*self, goal);
    GoalStepResult step = self->callbacks_.step ? self->callbacks_.step(handle)
                                                : GoalStepResult::Succeed;
    switch (step) {
      case GoalStepResult::Continue:
        self->schedule_step(id);  // repeated work items: long goals never starve others
        break;
      case GoalStepResult::Succeed:
        self->apply_transition(goal, GoalEvent::CompleteSuccess);
        break;
      case GoalStepResult::Abort:
        self->apply_transition(goal, GoalEvent::CompleteAborted);
        break;
      case GoalStepResult::ConfirmCanceled:
        self->apply_transition(goal, GoalEvent::CompleteCanceled);
        break;
    }
    return true;
  });
}

Result<Bytes> ActionServer::on_cancel_request(BytesView body) {
  auto id = read_goal_id(body);
  if (!id) return Error{Errc::decode_error, "missing goal id"};
  ByteWriter resp(1);
  auto it = goals_.find(*id);
  if (it == goals_.end()) {
    resp.u8(static_cast<uint8_t>(CancelOutcome::UnknownGoal));
    return resp.take();
  }
  Goal& goal = it->second;
  if (goal_terminal(goal.state)) {
    resp.u8(static_cast<uint8_t>(CancelOutcome::AlreadyTerminal));
    return resp.take();
  }
  ServerGoalHandle handle(*this, goal);
  bool honor = !callbacks_.on_cancel || callbacks_.on_cancel(handle);
  if (!honor || goal.state != GoalState::Executing) {
    // the table only admits CANCELING from EXECUTING; everything else declines
    resp.u8(static_cast<uint8_t>(CancelOutcome::Declined));
    return resp.take();
  }
  apply_transition(goal, GoalEvent::RequestCancel);
  resp.u8(static_cast<uint8_t>(CancelOutcome::Accepted));
  return resp.take();
}

Result<Bytes> ActionServer::on_result_request(BytesView body) {
  auto id = read_goal_id(body);
  if (!id) return Error{Errc::decode_error, "missing goal id"};
  ByteWriter resp(32);
  auto it = goals_.find(*id);
  if (it == goals_.end() || it->second.result_retrieved) {
    resp.u8(kResultUnknown);  // retrievable exactly once per goal
    return resp.take();
  }
  Goal& goal = it->second;
  if (!goal_terminal(goal.state)) {
    resp.u8(kResultNotReady);
    return resp.take();
  }
  resp.u8(kResultReady);
  resp.u8(static_cast<uint8_t>(goal.state));
  interfaces::MessageValue result =
      goal.result ? *goal.result : interfaces::MessageValue(result_type_);
  auto bytes = interfaces::serialize(result);
  if (!bytes.ok()) return bytes.error();
  resp.raw(bytes.value());
  goal.result_retrieved = true;
  return resp.take();
}

Status ServerGoalHandle::publish_feedback(const interfaces::MessageValue& feedback) {
  auto bytes = interfaces::serialize(feedback);
  if (!bytes.ok()) return bytes.error();
  ByteWriter w(16 + bytes.value().size());
  w.raw(goal_.id.bytes.data(), 16);
  w.raw(bytes.value());
  return server_.feedback_pub_->publish_serialized(w.take());
}

// ------------------------------------------------------------- client -----

Result<std::shared_ptr<ActionClient>> ActionClient::create(
    core::Node& node, const std::string& action, interfaces::TypeDescriptorPtr goal_type,
    interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type) {
  auto client = std::shared_ptr<ActionClient>(new ActionClient());
  client->action_ = node.resolve(action);
  client->ctx_ = &node.context();
  client->goal_type_ = std::move(goal_type);
  client->feedback_type_ = std::move(feedback_type);
  client->result_type_ = std::move(result_type);

  auto topics = detail::action_topics(client->action_, client->goal_type_->hash(),
                                      client->feedback_type_->hash(),
                                      client->result_type_->hash());

  auto goal_cli = detail::RawServiceClient::create(node, topics.goal_service,
                                                   client->goal_type_->name() + "#goal",
                                                   topics.goal_hash, topics.goal_hash);
  if (!goal_cli.ok()) return goal_cli.error();
  client->goal_cli_ = goal_cli.value();
  auto cancel_cli = detail::RawServiceClient::create(node, topics.cancel_service,
                                                     "action/Cancel", topics.cancel_hash,
                                                     topics.cancel_hash);
  if (!cancel_cli.ok()) return cancel_cli.error();
  client->cancel_cli_ = cancel_cli.value();
  auto result_cli = detail::RawServiceClient::create(
      node, topics.result_service, client->result_type_->name() + "#result",
      topics.result_hash, topics.result_hash);
  if (!result_cli.ok()) return result_cli.error();
  client->result_cli_ = result_cli.value();

  std::weak_ptr<ActionClient> weak = client;
  auto fb_sub = node.create_raw_subscription(
      topics.feedback_topic, client->feedback_type_->name() + "#feedback",
      topics.feedback_hash, feedback_qos(),
      [weak](BytesView payload, const core::MessageInfo&) {
        auto self = weak.lock();
        if (self) self->on_feedback(payload);
      });
  if (!fb_sub.ok()) return fb_sub.error();
  client->feedback_sub_ = fb_sub.value();

  auto st_sub = node.create_raw_subscription(
      topics.status_topic, "action/Status", topics.status_hash, status_qos(),
      [weak](BytesView payload, const core::MessageInfo&) {
        auto self = weak.lock();
        if (self) self->on_status(payload);
      });
  if (!st_sub.ok()) return st_sub.error();
  client->status_sub_ = st_sub.value();

  node.context().register_sweep(client);
  return client;
}

bool ActionClient::server_ready() const {
  return goal_cli_->service_ready() && result_cli_->service_ready() &&
         status_sub_->matched_count() > 0;
}

Result<std::shared_ptr<ClientGoalHandle>> ActionClient::async_send_goal(
    const interfaces::MessageValue& goal, FeedbackCallback on_feedback,
    ResultCallback on_result) {
  auto goal_bytes = interfaces::serialize(goal);
  if (!goal_bytes.ok()) return goal_bytes.error();

  auto handle = std::make_shared<ClientGoalHandle>();
  handle->id_ = make_goal_id();
  handle->on_feedback_ = std::move(on_feedback);
  handle->on_result_ = std::move(on_result);
  handles_[handle->id_] = handle;

  ByteWriter w(16 + goal_bytes.value().size());
  w.raw(handle->id_.bytes.data(), 16);
  w.raw(goal_bytes.value());

  std::weak_ptr<ActionClient> weak = weak_from_this();
  GoalId id = handle->id_;
  auto st = goal_cli_->async_call(w.take(), [weak, id](Result<Bytes> response) {
    auto self = weak.lock();
    if (!self) return;
    auto it = self->handles_.find(id);
    if (it == self->handles_.end()) return;
    auto handle = it->second;
    if (!response.ok() || response.value().empty()) {
      GoalResult r;
      r.goal = id;
      r.status = response.ok() ? Status(Errc::decode_error, "malformed goal response")
                               : Status(response.error());
      self->finish(handle, std::move(r));
      return;
    }
    if (response.value()[0] == 0) {
      GoalResult r;
      r.goal = id;
      r.status = Status(Errc::unavailable, "goal rejected by server");
      self->finish(handle, std::move(r));
    }
    // accepted: status/feedback topics drive the handle from here
  });
  if (!st.ok()) {
    handles_.erase(handle->id_);
    return st.error();
  }
  return handle;
}

void ActionClient::on_status(BytesView payload) {
  if (payload.size() != 17) return;
  auto id = read_goal_id(payload);
  auto it = handles_.find(*id);
  if (it == handles_.end()) return;  // someone else's goal
  auto handle = it->second;
  auto state = static_cast<GoalState>(payload[16]);
  handle->state_ = state;
  if (goal_terminal(state) && !handle->result_requested_) {
    handle->result_requested_ = true;
    request_result(handle);
  }
}

void ActionClient::on_feedback(BytesView payload) {
  if (payload.size() < 16) return;
  auto id = read_goal_id(payload);
  auto it = handles_.find(*id);
  if (it == handles_.end()) return;
  auto handle = it->second;
  if (!handle->on_feedback_) return;
  auto msg = interfaces::deserialize(payload.subspan(16), feedback_type_);
  if (!msg.ok()) return;
  ++handle->feedback_count_;
  FeedbackEvent ev{*id, std::move(msg.value())};
  handle->on_feedback_(ev);
}

void ActionClient::request_result(const std::shared_ptr<ClientGoalHandle>& handle) {
  std::weak_ptr<ActionClient> weak = weak_from_this();
  GoalId id = handle->id_;
  (void)result_cli_->async_call(
      frame_goal_id(id), [weak, id](Result<Bytes> response) {
        auto self = weak.lock();
        if (!self) return;
        auto it = self->handles_.find(id);
        if (it == self->handles_.end()) return;
        auto handle = it->second;
        GoalResult r;
        r.goal = id;
        if (!response.ok()) {
          r.status = Status(response.error());
        } else if (response.value().empty() || response.value()[0] != kResultReady) {
          uint8_t code = response.value().empty() ? kResultUnknown : response.value()[0];
          if (code == kResultNotReady) {
            // terminal status raced the result; ask again
            handle->result_requested_ = false;
            return;
          }
          r.status = Status(Errc::not_found, "result already consumed or unknown");
        } else {
          ByteReader br(BytesView(response.value()).subspan(1));
          r.state = static_cast<GoalState>(br.u8());
          auto msg = interfaces::deserialize(
              BytesView(response.value()).subspan(2), self->result_type_);
          if (msg.ok()) {
            r.value = std::move(msg.value());
          } else {
            r.status = Status(msg.error());
          }
        }
        self->finish(handle, std::move(r));
      });
}

void ActionClient::finish(const std::shared_ptr<ClientGoalHandle>& handle, GoalResult result) {
  if (handle->result_delivered_) return;  // at-most-once result delivery
  handle->result_delivered_ = true;
  if (goal_terminal(handle->state_)) result.state = handle->state_;
  if (!result.status.ok() && !goal_terminal(handle->state_)) handle->state_ = GoalState::Aborted;
  if (handle->on_result_) {
    auto cb = handle->on_result_;
    ctx_->post_work(core::WorkKind::ServiceResponse, [cb, result = std::move(result)]() {
      cb(result);
      return true;
    });
  }
}

Status ActionClient::async_cancel(const std::shared_ptr<ClientGoalHandle>& handle,
                                  CancelCallback callback) {
  if (!handle) return Error{Errc::validation_error, "null goal handle"};
  if (handle->terminal()) {
    // server would answer the same; resolved locally for absorbing states
    ctx_->post_work(core::WorkKind::ServiceResponse, [callback]() {
      callback(CancelOutcome::AlreadyTerminal);
      return true;
    });
    return {};
  }
  return cancel_cli_->async_call(frame_goal_id(handle->id_),
                                 [callback](Result<Bytes> response) {
                                   if (!response.ok() || response.value().size() != 1) {
                                     callback(CancelOutcome::UnknownGoal);
                                     return;
                                   }
                                   callback(static_cast<CancelOutcome>(response.value()[0]));
                                 });
}

std::optional<MonoTime> ActionClient::sweep(MonoTime now) {
  bool active = false;
  for (const auto& [id, handle] : handles_)
    if (!handle->result_delivered_) active = true;
  if (!active) {
    server_absent_since_ = MonoTime{};
    return std::nullopt;
  }
  // Discovery lease expiry unmatches a vanished server's endpoints; error
  // the surviving handles shortly after.
  if (status_sub_->matched_count() > 0) {
    server_absent_since_ = MonoTime{};
    return now + std::chrono::milliseconds(100);
  }
  if (server_absent_since_ == MonoTime{}) {
    server_absent_since_ = now;
    return now + std::chrono::milliseconds(100);
  }
  if (now - server_absent_since_ < std::chrono::milliseconds(200))
    return now + std::chrono::milliseconds(100);
  auto handles = handles_;
  for (auto& [id, handle] : handles) {
    if (handle->result_delivered_) continue;
    GoalResult r;
    r.goal = id;
    r.status = Status(Errc::unavailable, "action server vanished mid-goal");
    finish(handle, std::move(r));
  }
  return std::nullopt;
}

}  // namespace mbus::rpc

namespace mbus::core {

Result<std::shared_ptr<rpc::ActionServer>> Node::create_action_server(
    const std::string& action, interfaces::TypeDescriptorPtr goal_type,
    interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type,
    rpc::ActionServerCallbacks callbacks) {
  if (!goal_type || !feedback_type || !result_type)
    return Error{Errc::validation_error, "null action type descriptor"};
  auto server = rpc::ActionServer::create(*this, action, std::move(goal_type),
                                          std::move(feedback_type), std::move(result_type),
                                          std::move(callbacks));
  if (!server.ok()) return server.error();
  services_.push_back(server.value());
  return server.value();
}

Result<std::shared_ptr<rpc::ActionClient>> Node::create_action_client(
    const std::string& action, interfaces::TypeDescriptorPtr goal_type,
    interfaces::TypeDescriptorPtr feedback_type, interfaces::TypeDescriptorPtr result_type) {
  if (!goal_type || !feedback_type || !result_type)
    return Error{Errc::validation_error, "null action type descriptor"};
  auto client = rpc::ActionClient::create(*this, action, std::move(goal_type),
                                          std::move(feedback_type), std::move(result_type));
  if (!client.ok()) return client.error();
  services_.push_back(client.value());
  return client.value();
}

}  // namespace mbus::core
