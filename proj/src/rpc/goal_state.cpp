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

#include "mbus/rpc/goal_state.hpp"

#include <random>

#include "mbus/bytes.hpp"

namespace mbus::rpc {

std::string GoalId::str() const { return to_hex(BytesView(bytes.data(), 8)); }

GoalId make_goal_id() {
  std::random_device rd;
  GoalId id;
  for (size_t i = 0; i < 16; i += 4) {
    uint32_t r = rd();
    std::memcpy(id.bytes.data() + i, &r, 4);
  }
  return id;
}

const char* goal_state_name(GoalState s) {
  switch (s) {
    case GoalState::Accepted: return "ACCEPTED";
    case GoalState::Executing: return "EXECUTING";
    case GoalState::Canceling: return "CANCELING";
    case GoalState::Succeeded: return "SUCCEEDED";
    case GoalState::Canceled: return "CANCELED";
    case GoalState::Aborted: return "ABORTED";
  }
  return "?";
}

const char* goal_event_name(GoalEvent e) {
  switch (e) {
    case GoalEvent::Execute: return "EXECUTE";
    case GoalEvent::RequestCancel: return "REQUEST_CANCEL";
    case GoalEvent::CompleteSuccess: return "COMPLETE_SUCCESS";
    case GoalEvent::CompleteAborted: return "COMPLETE_ABORTED";
    case GoalEvent::CompleteCanceled: return "COMPLETE_CANCELED";
  }
  return "?";
}

std::optional<GoalState> goal_state_from_name(const std::string& name) {
  for (int i = 0; i <= 5; ++i) {
    auto s = static_cast<GoalState>(i);
    if (name == goal_state_name(s)) return s;
  }
  return std::nullopt;
}

std::optional<GoalEvent> goal_event_from_name(const std::string& name) {
  for (int i = 0; i <= 4; ++i) {
    auto e = static_cast<GoalEvent>(i);
    if (name == goal_event_name(e)) return e;
  }
  return std::nullopt;
}

Result<GoalState> goal_transition(GoalState state, GoalEvent event) {
  auto reject = [&]() -> Result<GoalState> {
    return Error{Errc::transition_invalid, std::string(goal_event_name(event)) +
                                               " not legal in " + goal_state_name(state)};
  };
  if (goal_terminal(state)) return reject();
  switch (state) {
    case GoalState::Accepted:
      return event == GoalEvent::Execute ? Result<GoalState>(GoalState::Executing) : reject();
    case GoalState::Executing:
      switch (event) {
        case GoalEvent::RequestCancel: return GoalState::Canceling;
        case GoalEvent::CompleteSuccess: return GoalState::Succeeded;
        case GoalEvent::CompleteAborted: return GoalState::Aborted;
        default: return reject();
      }
    case GoalState::Canceling:
      switch (event) {
        case GoalEvent::CompleteCanceled: return GoalState::Canceled;
        case GoalEvent::CompleteSuccess: return GoalState::Succeeded;
        case GoalEvent::CompleteAborted: return GoalState::Aborted;
        default: return reject();
      }
    default: return reject();
  }
}

}  // namespace mbus::rpc
