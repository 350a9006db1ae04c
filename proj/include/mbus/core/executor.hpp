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

#include <memory>
#include <vector>

#include "mbus/core/context.hpp"

namespace mbus::core {

/// The swappable scheduling seam: node code never depends on which executor
/// spins its context. The reference implementation is single-threaded and
/// never runs two callbacks concurrently.
class Executor {
 public:
  virtual ~Executor() = default;

  void add_context(std::shared_ptr<Context> ctx) { contexts_.push_back(std::move(ctx)); }
  const std::vector<std::shared_ptr<Context>>& contexts() const { return contexts_; }

  /// Executes ready work once, waiting up to max_wait for something to
  /// become ready. Returns the number of items executed.
  virtual size_t spin_once(Duration max_wait) = 0;

  /// Runs until every attached context is shut down.
  virtual void spin() = 0;

 protected:
  std::vector<std::shared_ptr<Context>> contexts_;
};

class SingleThreadedExecutor final : public Executor {
 public:
  size_t spin_once(Duration max_wait) override;
  void spin() override;
};

}  // namespace mbus::core
