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
#include <optional>
#include <string>

#include "mbus/result.hpp"

namespace mbus::mgmt {

enum class LifecycleState : uint8_t {
  Unconfigured = 0,
  Inactive = 1,
  Active = 2,
  Finalized = 3,
};

enum class TransitionRequest : uint8_t {
  Configure = 0,
  Activate = 1,
  Deactivate = 2,
  Cleanup = 3,
  Shutdown = 4,
};

enum class HookResult : uint8_t { Success = 0, Failure = 1 };

const char* lifecycle_state_name(LifecycleState s);
const char* transition_request_name(TransitionRequest r);
std::optional<LifecycleState> lifecycle_state_from_name(const std::string& name);
std::optional<TransitionRequest> transition_request_from_name(const std::string& name);

/// The minimal four-state machine:
///   UNCONFIGURED --configure--> INACTIVE --activate--> ACTIVE
///   ACTIVE --deactivate--> INACTIVE --cleanup--> UNCONFIGURED
///   any non-FINALIZED --shutdown--> FINALIZED (absorbing)
/// A FAILURE hook outcome on a legal edge keeps the origin state; illegal
/// pairs fail with transition_invalid and the hook never runs.
Result<LifecycleState> lifecycle_transition(LifecycleState state, TransitionRequest request,
                                            HookResult hook_outcome);

/// Whether the pair is a legal edge at all (hooks run only for legal pairs).
bool transition_allowed(LifecycleState state, TransitionRequest request);

/// Per-transition user hooks; absent hooks default to Success.
struct LifecycleHooks {
  std::function<HookResult()> on_configure;
  std::function<HookResult()> on_activate;
  std::function<HookResult()> on_deactivate;
  std::function<HookResult()> on_cleanup;
  std::function<HookResult()> on_shutdown;

  HookResult run(TransitionRequest req) const;
};

}  // namespace mbus::mgmt
