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

#include <optional>
#include <string>

#include "mbus/guid.hpp"
#include "mbus/result.hpp"

namespace mbus::rpc {

/// 16-byte client-generated goal identity (random; no server round trip).
struct GoalId {
  std::array<uint8_t, 16> bytes{};
  auto operator<=>(const GoalId&) const = default;
  std::string str() const;
};
GoalId make_goal_id();

enum class GoalState : uint8_t {
  Accepted = 0,
  Executing = 1,
  Canceling = 2,
  Succeeded = 3,
  Canceled = 4,
  Aborted = 5,
};

enum class GoalEvent : uint8_t {
  Execute = 0,
  RequestCancel = 1,
  CompleteSuccess = 2,
  CompleteAborted = 3,
  CompleteCanceled = 4,
};

const char* goal_state_name(GoalState s);
const char* goal_event_name(GoalEvent e);
std::optional<GoalState> goal_state_from_name(const std::string& name);
std::optional<GoalEvent> goal_event_from_name(const std::string& name);

inline bool goal_terminal(GoalState s) {
  return s == GoalState::Succeeded || s == GoalState::Canceled || s == GoalState::Aborted;
}

/// The transition table: ACCEPTED -e-> EXECUTING -s/a-> {SUCCEEDED|ABORTED},
/// EXECUTING -c-> CANCELING -{c|s|a}-> {CANCELED|SUCCEEDED|ABORTED}; terminal
/// states absorb everything. Illegal events fail without a state change.
Result<GoalState> goal_transition(GoalState state, GoalEvent event);

}  // namespace mbus::rpc
