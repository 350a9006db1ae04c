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
#include <functional>
#include <string>
#include <vector>

#include "mbus/discovery/qos_matching.hpp"
#include "mbus/guid.hpp"

namespace mbus::core {

enum class EndpointEventKind : uint8_t {
  IncompatibleQos,
  TypeMismatch,
  DeadlineMissed,
  LivelinessChanged,
  SampleLost,
  Matched,
  Unmatched,
};

struct EndpointEvent {
  EndpointEventKind kind{};
  std::string topic;
  Guid remote_endpoint{};
  std::vector<discovery::QosPolicy> qos_reasons;  // IncompatibleQos
  uint64_t count = 1;                             // SampleLost batches
  bool alive = false;                             // LivelinessChanged
};

using EndpointEventCallback = std::function<void(const EndpointEvent&)>;

const char* endpoint_event_name(EndpointEventKind k);

}  // namespace mbus::core
