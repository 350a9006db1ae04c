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

#include "mbus/bytes.hpp"
#include "mbus/result.hpp"
#include "mbus/time.hpp"

namespace mbus::transport {

enum class Reliability : uint8_t { BestEffort = 0, Reliable = 1 };
enum class Durability : uint8_t { Volatile = 0, TransientLocal = 1 };
enum class History : uint8_t { KeepLast = 0, KeepAll = 1 };
enum class Liveliness : uint8_t { Automatic = 0, Manual = 1 };

/// The seven policies governing an endpoint's delivery contract. Absent
/// durations mean infinite.
struct QosProfile {
  Reliability reliability = Reliability::Reliable;
  Durability durability = Durability::Volatile;
  History history = History::KeepLast;
  uint32_t depth = 16;  // KEEP_LAST only
  std::optional<Duration> deadline{};
  std::optional<Duration> lifespan{};
  Liveliness liveliness = Liveliness::Automatic;
  std::optional<Duration> lease_duration{};

  bool operator==(const QosProfile&) const = default;

  static QosProfile reliable_keep_last(uint32_t depth) {
    QosProfile q;
    q.depth = depth;
    return q;
  }
  static QosProfile best_effort() {
    QosProfile q;
    q.reliability = Reliability::BestEffort;
    return q;
  }
  static QosProfile reliable_keep_all() {
    QosProfile q;
    q.history = History::KeepAll;
    return q;
  }
  static QosProfile transient_local(uint32_t depth) {
    QosProfile q;
    q.durability = Durability::TransientLocal;
    q.depth = depth;
    return q;
  }
};

Status validate_qos(const QosProfile& q);

void encode_qos(ByteWriter& w, const QosProfile& q);
Result<QosProfile> decode_qos(ByteReader& r);

std::string qos_summary(const QosProfile& q);

}  // namespace mbus::transport
