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

#include "mbus/discovery/qos_matching.hpp"

namespace mbus::discovery {

using transport::Liveliness;
using transport::QosProfile;
using transport::Reliability;

const char* qos_policy_name(QosPolicy p) {
  switch (p) {
    case QosPolicy::Reliability: return "RELIABILITY";
    case QosPolicy::Durability: return "DURABILITY";
    case QosPolicy::Deadline: return "DEADLINE";
    case QosPolicy::Liveliness: return "LIVELINESS";
    case QosPolicy::LeaseDuration: return "LEASE_DURATION";
  }
  return "?";
}

namespace {
// Absent durations are infinite; the offer must not exceed the request.
bool offered_within(const std::optional<Duration>& offered,
                    const std::optional<Duration>& requested) {
  if (!requested) return true;
  if (!offered) return false;
  return *offered <= *requested;
}
}  // namespace

QosCompatibility qos_compatible(const QosProfile& offered, const QosProfile& requested) {
  QosCompatibility c;
  auto fail = [&c](QosPolicy p) {
    c.compatible = false;
    c.reasons.push_back(p);
  };

  if (static_cast<int>(offered.reliability) < static_cast<int>(requested.reliability))
    fail(QosPolicy::Reliability);
  if (static_cast<int>(offered.durability) < static_cast<int>(requested.durability))
    fail(QosPolicy::Durability);
  if (!offered_within(offered.deadline, requested.deadline)) fail(QosPolicy::Deadline);
  if (static_cast<int>(offered.liveliness) < static_cast<int>(requested.liveliness))
    fail(QosPolicy::Liveliness);
  if (!offered_within(offered.lease_duration, requested.lease_duration))
    fail(QosPolicy::LeaseDuration);
  return c;
}

std::string reasons_summary(const QosCompatibility& c) {
  std::string s;
  for (const auto& r : c.reasons) {
    if (!s.empty()) s += ",";
    s += qos_policy_name(r);
  }
  return s;
}

}  // namespace mbus::discovery
