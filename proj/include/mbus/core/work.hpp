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

#include <cstdint>
#include <optional>

#include "mbus/time.hpp"

namespace mbus::core {

/// Executor work classification (introspection and tests).
enum class WorkKind : uint8_t {
  Message,
  ServiceRequest,
  ServiceResponse,
  Timer,
  Event,
  GoalWork,
};

/// Deferred upkeep duty with a deadline; rpc timeouts and action supervision
/// register here. sweep() returns the next due time, or nullopt when done.
class Sweepable {
 public:
  virtual ~Sweepable() = default;
  virtual std::optional<MonoTime> sweep(MonoTime now) = 0;
};

}  // namespace mbus::core
