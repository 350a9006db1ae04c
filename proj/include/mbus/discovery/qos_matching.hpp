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

#include <string>
#include <vector>

#include "mbus/transport/qos.hpp"

namespace mbus::discovery {

enum class QosPolicy : uint8_t {
  Reliability,
  Durability,
  Deadline,
  Liveliness,
  LeaseDuration,
};

const char* qos_policy_name(QosPolicy p);

struct QosCompatibility {
  bool compatible = true;
  std::vector<QosPolicy> reasons;  // violated policies, offer side
};

/// Request-offered rule. Compatible iff the offer is at least as strong as
/// the request on every ordered policy:
///   reliability: RELIABLE > BEST_EFFORT
///   durability:  TRANSIENT_LOCAL > VOLATILE
///   deadline:    offered <= requested (absent = infinite)
///   liveliness:  MANUAL > AUTOMATIC
///   lease:       offered <= requested (absent = infinite)
/// History and lifespan never affect matching.
QosCompatibility qos_compatible(const transport::QosProfile& offered,
                                const transport::QosProfile& requested);

std::string reasons_summary(const QosCompatibility& c);

}  // namespace mbus::discovery
