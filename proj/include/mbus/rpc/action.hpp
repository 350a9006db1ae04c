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

#include <map>

#include "mbus/rpc/service.hpp"

namespace mbus::rpc {

/// Actions ride on three services (goal, cancel, result) and two topics
/// (feedback, status), all built from public topic machinery, so action
/// traffic is observable and recordable like any other topic.
class ActionServer : public std::enable_shared_from_this<ActionServer> {
 public:
  const std::string& action_name() const { return action_; }
  size_t active_goals() const;
  uint64_t goals_accepted() const { return goals_accepted_; }
  uint64_t goals_rejected() const { return goals_rejected_; }

 private:
  friend class core::Node;
  friend class ServerGoalHandle;

  struct Goal {
    GoalId id{};
    GoalState state = GoalState::Accepted;
    std::shared_ptr<const interfaces::MessageValue> goal_msg;
    std::optional<interfaces::MessageValue> result;
    bool result_retrieved = false;
    std::map<GoalState, MonoTime> transition_times;
  };

  ActionServer() = default;
  static Result<std::shared_ptr<ActionServer>> create(core::Node& node,
                                                      const std::string& action,
                                                      interfaces::TypeDescriptorPtr goal_type,
                                                      interfaces::TypeDescriptorPtr feedback_type,
                                                      interfaces::TypeDescriptorPtr result_type,
                                                      ActionServerCallbacks callbacks);

  Result<Bytes> on_goal_request(BytesView body);
  Result<Bytes> on_cancel_request(BytesView body);
  Result<Bytes> on_result_request(BytesView body);
  void schedule_step(const GoalId& id);
  void apply_transition(Goal& goal, GoalEvent event);
  void publish_status(const Goal& goal);

  std::string action_;
  core::Context* ctx_ = nullptr;
  interfaces::TypeDescriptorPtr goal_type_, feedback_type_, result_type_;
  ActionServerCallbacks callbacks_;
  std::shared_ptr<detail::RawServiceServer> goal_srv_, cancel_srv_, result_srv_;
  std::shared_ptr<core::Publisher> feedback_pub_, status_pub_;
  std::map<GoalId, Goal> goals_;
  uint64_t goals_accepted_ = 0;
  uint64_t goals_rejected_ = 0;
};

/// Server-side view of one executing goal, passed to the step callback.
class ServerGoalHandle {
 public:
  const GoalId& id() const { return goal_.id; }
  const interfaces::MessageValue& goal() const { return *goal_.goal_msg; }
  GoalState state() const { return goal_.state; }
  bool canceling() const { return goal_.state == GoalState::Canceling; }

  Status publish_feedback(const interfaces::MessageValue& feedback);
  void set_result(interfaces::MessageValue result) { goal_.result = std::move(result); }

 private:
  friend class ActionServer;
  ServerGoalHandle(ActionServer& server, ActionServer::Goal& goal)
      : server_(server), goal_(goal) {}
  ActionServer& server_;
  ActionServer::Goal& goal_;
};

class ClientGoalHandle {
 public:
  const GoalId& id() const { return id_; }
  GoalState state() const { return state_; }
  bool terminal() const { return goal_terminal(state_); }
  size_t feedback_count() const { return feedback_count_; }

 private:
  friend class ActionClient;
  GoalId id_{};
  GoalState state_ = GoalState::Accepted;
  FeedbackCallback on_feedback_;
  ResultCallback on_result_;
  bool result_delivered_ = false;
  bool result_requested_ = false;
  size_t feedback_count_ = 0;
};

class ActionClient : public core::Sweepable,
                     public std::enable_shared_from_this<ActionClient> {
 public:
  /// Sends a goal; the handle reports acceptance, ordered feedback, and the
  /// result exactly once. A vanished server errors the handle after the
  /// discovery lease removes it from the graph.
  Result<std::shared_ptr<ClientGoalHandle>> async_send_goal(
      const interfaces::MessageValue& goal, FeedbackCallback on_feedback,
      ResultCallback on_result);

  using CancelCallback = std::function<void(CancelOutcome)>;
  Status async_cancel(const std::shared_ptr<ClientGoalHandle>& handle, CancelCallback callback);

  bool server_ready() const;
  const std::string& action_name() const { return action_; }

  std::optional<MonoTime> sweep(MonoTime now) override;

 private:
  friend class core::Node;

  ActionClient() = default;
  static Result<std::shared_ptr<ActionClient>> create(core::Node& node,
                                                      const std::string& action,
                                                      interfaces::TypeDescriptorPtr goal_type,
                                                      interfaces::TypeDescriptorPtr feedback_type,
                                                      interfaces::TypeDescriptorPtr result_type);

  void on_status(BytesView payload);
  void on_feedback(BytesView payload);
  void request_result(const std::shared_ptr<ClientGoalHandle>& handle);
  void finish(const std::shared_ptr<ClientGoalHandle>& handle, GoalResult result);

  std::string action_;
  core::Context* ctx_ = nullptr;
  interfaces::TypeDescriptorPtr goal_type_, feedback_type_, result_type_;
  std::shared_ptr<detail::RawServiceClient> goal_cli_, cancel_cli_, result_cli_;
  std::shared_ptr<core::Subscription> feedback_sub_, status_sub_;
  std::map<GoalId, std::shared_ptr<ClientGoalHandle>> handles_;
  MonoTime server_absent_since_{};
};

namespace detail {
struct ActionTopicInfo {
  std::string goal_service, cancel_service, result_service;
  std::string feedback_topic, status_topic;
  uint64_t feedback_hash, status_hash, goal_hash, cancel_hash, result_hash;
};
ActionTopicInfo action_topics(const std::string& resolved_action, uint64_t goal_type_hash,
                              uint64_t feedback_type_hash, uint64_t result_type_hash);
}  // namespace detail

}  // namespace mbus::rpc
