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

#include "mbus/time.hpp"

namespace mbus::core {

class Context;
class Node;

/// Periodic timer bound to a node. Managed nodes fire timers only while
/// ACTIVE; missed periods are skipped, not replayed in a burst.
class Timer {
 public:
  Duration period() const { return period_; }
  void cancel() { canceled_ = true; }
  bool canceled() const { return canceled_; }
  uint64_t fire_count() const { return fire_count_; }

 private:
  friend class Context;
  friend class Node;

  Timer(Node& node, Duration period, std::function<void()> callback, MonoTime first)
      : node_(&node), period_(period), callback_(std::move(callback)), next_fire_(first) {}

  Node* node_;
  Duration period_;
  std::function<void()> callback_;
  MonoTime next_fire_;
  uint64_t fire_count_ = 0;
  bool canceled_ = false;
};

}  // namespace mbus::core
