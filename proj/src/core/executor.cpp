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

#include "mbus/core/executor.hpp"

namespace mbus::core {

size_t SingleThreadedExecutor::spin_once(Duration max_wait) {
  if (contexts_.empty()) return 0;
  if (contexts_.size() == 1) return contexts_[0]->spin_once(max_wait);

  size_t total = 0;
  for (auto& ctx : contexts_) total += ctx->spin_once(Duration::zero());
  if (total > 0) return total;
  Duration slice = max_wait / static_cast<int64_t>(contexts_.size());
  if (slice <= Duration::zero()) slice = max_wait;
  for (auto& ctx : contexts_) total += ctx->spin_once(slice);
  return total;
}

void SingleThreadedExecutor::spin() {
  for (;;) {
    bool all_down = true;
    for (auto& ctx : contexts_)
      if (!ctx->shutdown_requested()) all_down = false;
    if (all_down) return;
    spin_once(std::chrono::milliseconds(100));
  }
}

}  // namespace mbus::core
