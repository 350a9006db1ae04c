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

#include <functional>
#include <memory>

#include "mbus/interfaces/message_value.hpp"
#include "mbus/rpc/goal_state.hpp"

namespace mbus::rpc {

class ServiceServer;
class ServiceClient;
class ActionServer;
class ActionClient;
class ServerGoalHandle;
class ClientGoalHandle;

/// Server-side request handler; an error result travels back to the caller
/// as an error response.
using ServiceHandler =
    std::function<Result<interfaces::MessageValue>(const interfaces::MessageValue& request)>;

using ResponseCallback = std::function<void(Result<interfaces::MessageValue>)>;

/// One executor work step of a running goal; returning Continue reschedules.
enum class GoalStepResult : uint8_t { Continue, Succeed, Abort, ConfirmCanceled };

struct ActionServerCallbacks {
  /// Accept/reject predicate; absent accepts everything.
  std::function<bool(const interfaces::MessageValue& goal)> accept;
  /// Invoked repeatedly as GOAL_WORK items until terminal. Long goals never
  /// starve other callbacks: one step per executor pass.
  std::function<GoalStepResult(ServerGoalHandle&)> step;
  /// Cancel policy: return true to honor (goal enters CANCELING), false to
  /// decline. Absent honors every cancel.
  std::function<bool(const ServerGoalHandle&)> on_cancel;
};

enum class CancelOutcome : uint8_t {
  Accepted = 0,        // goal is CANCELING now
  Declined = 1,        // server keeps executing
  AlreadyTerminal = 2,
  UnknownGoal = 3,
};
const char* cancel_outcome_name(CancelOutcome o);

struct FeedbackEvent {
  GoalId goal;
  interfaces::MessageValue message;
};
using FeedbackCallback = std::function<void(const FeedbackEvent&)>;

struct GoalResult {
  GoalId goal;
  GoalState state = GoalState::Aborted;          // terminal state
  std::optional<interfaces::MessageValue> value;  // absent on transport errors
  Status status;                                  // non-ok on rejection/vanish/timeout
};
using ResultCallback = std::function<void(const GoalResult&)>;

}  // namespace mbus::rpc
