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

#include <chrono>
#include <cstdint>

namespace mbus {

using Duration = std::chrono::nanoseconds;
using MonoTime = std::chrono::steady_clock::time_point;

inline constexpr MonoTime kTimeZero{};

inline int64_t to_ns(Duration d) { return d.count(); }
inline int64_t to_ns(MonoTime t) { return t.time_since_epoch().count(); }
inline MonoTime mono_from_ns(int64_t ns) { return MonoTime(Duration(ns)); }

inline uint64_t wall_now_ns() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
}

/// Monotonic time source. The simulated network substitutes a manually
/// advanced clock so protocol tests are fully deterministic.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual MonoTime now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  MonoTime now() const override { return std::chrono::steady_clock::now(); }
};

class SimClock final : public Clock {
 public:
  MonoTime now() const override { return now_; }
  void advance(Duration d) { now_ += d; }
  void set(MonoTime t) { now_ = t; }

 private:
  MonoTime now_ = mono_from_ns(1'000'000'000);  // start at t=1s, away from zero
};

}  // namespace mbus
