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

#include "mbus/mgmt/lifecycle.hpp"

namespace mbus::mgmt {

const char* lifecycle_state_name(LifecycleState s) {
  switch (s) {
    case LifecycleState::Unconfigured: return "UNCONFIGURED";
    case LifecycleState::Inactive: return "INACTIVE";
    case LifecycleState::Active: return "ACTIVE";
    case LifecycleState::Finalized: return "FINALIZED";
  }
  return "?";
}

const char* transition_request_name(TransitionRequest r) {
  switch (r) {
    case TransitionRequest::Configure: return "CONFIGURE";
    case TransitionRequest::Activate: return "ACTIVATE";
    case TransitionRequest::Deactivate: return "DEACTIVATE";
    case TransitionRequest::Cleanup: return "CLEANUP";
    case TransitionRequest::Shutdown: return "SHUTDOWN";
  }
  return "?";
}

std::optional<LifecycleState> lifecycle_state_from_name(const std::string& name) {
  for (int i = 0; i <= 3; ++i) {
    auto s = static_cast<LifecycleState>(i);
    if (name == lifecycle_state_name(s)) return s;
  }
  return std::nullopt;
}

std::optional<TransitionRequest> transition_request_from_name(const std::string& name) {
  for (int i = 0; i <= 4; ++i) {
    auto r = static_cast<TransitionRequest>(i);
    if (name == transition_request_name(r)) return r;
  }
  return std::nullopt;
}

bool transition_allowed(LifecycleState state, TransitionRequest request) {
  if (state == LifecycleState::Finalized) return false;
  if (request == TransitionRequest::Shutdown) return true;
  switch (state) {
    case LifecycleState::Unconfigured: return request == TransitionRequest::Configure;
    case LifecycleState::Inactive:
      return request == TransitionRequest::Activate || request == TransitionRequest::Cleanup;
    case LifecycleState::Active: return request == TransitionRequest::Deactivate;
    default: return false;
  }
}

Result<LifecycleState> lifecycle_transition(LifecycleState state, TransitionRequest request,
                                            HookResult hook_outcome) {
  if (!transition_allowed(state, request))
    return Error{Errc::transition_invalid,
                 std::string(transition_request_name(request)) + " not legal from " +
                     lifecycle_state_name(state)};
  if (hook_outcome == HookResult::Failure) return state;  // stay at origin
  if (request == TransitionRequest::Shutdown) return LifecycleState::Finalized;
  switch (request) {
    case TransitionRequest::Configure: return LifecycleState::Inactive;
    case TransitionRequest::Activate: return LifecycleState::Active;
    case TransitionRequest::Deactivate: return LifecycleState::Inactive;
    case TransitionRequest::Cleanup: return LifecycleState::Unconfigured;
    default: return LifecycleState::Finalized;
  }
}

HookResult LifecycleHooks::run(TransitionRequest req) const {
  const std::function<HookResult()>* hook = nullptr;
  switch (req) {
    case TransitionRequest::Configure: hook = &on_configure; break;
    case TransitionRequest::Activate: hook = &on_activate; break;
    case TransitionRequest::Deactivate: hook = &on_deactivate; break;
    case TransitionRequest::Cleanup: hook = &on_cleanup; break;
    case TransitionRequest::Shutdown: hook = &on_shutdown; break;
  }
  return (hook && *hook) ? (*hook)() : HookResult::Success;
}

}  // namespace mbus::mgmt
