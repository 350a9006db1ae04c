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

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <string>

namespace mbus {

/// 16-byte identifier: a 12-byte participant prefix plus a 4-byte entity id.
/// Entity 0 is the participant itself; endpoints get sequential entity ids.
struct Guid {
  std::array<uint8_t, 16> bytes{};

  auto operator<=>(const Guid&) const = default;

  bool is_nil() const {
    for (uint8_t b : bytes)
      if (b != 0) return false;
    return true;
  }

  Guid with_entity(uint32_t entity) const {
    Guid g = *this;
    g.bytes[12] = static_cast<uint8_t>(entity);
    g.bytes[13] = static_cast<uint8_t>(entity >> 8);
    g.bytes[14] = static_cast<uint8_t>(entity >> 16);
    g.bytes[15] = static_cast<uint8_t>(entity >> 24);
    return g;
  }

  /// Participant guid owning this entity (entity id zeroed).
  Guid participant() const { return with_entity(0); }

  bool same_participant(const Guid& other) const {
    return std::memcmp(bytes.data(), other.bytes.data(), 12) == 0;
  }

  std::string short_str() const;  // first 8 hex chars, for logs
  std::string str() const;
};

/// Random participant prefix (entity id 0). Not security-grade; identities
/// come from the security module.
Guid make_participant_guid();

struct GuidHash {
  size_t operator()(const Guid& g) const {
    uint64_t a, b;
    std::memcpy(&a, g.bytes.data(), 8);
    std::memcpy(&b, g.bytes.data() + 8, 8);
    return static_cast<size_t>(a * 0x9e3779b97f4a7c15ULL ^ b);
  }
};

}  // namespace mbus
