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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace mbus::core {

/// IPv4 address + UDP port, host byte order. Simulated links use the same
/// shape with synthetic addresses.
struct Locator {
  uint32_t ip = 0;
  uint16_t port = 0;

  auto operator<=>(const Locator&) const = default;
  bool valid() const { return port != 0; }

  std::string str() const;
  static std::optional<Locator> parse(const std::string& host_port);  // "a.b.c.d:port"
};

}  // namespace mbus::core
