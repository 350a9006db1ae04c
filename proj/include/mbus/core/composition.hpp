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

#include <map>

#include "mbus/core/context.hpp"

namespace mbus::core {

/// Where a node runs is a deployment choice, not a code one: a factory makes
/// the node against whatever context the process provides.
using NodeFactory = std::function<Result<std::shared_ptr<Node>>(Context& ctx)>;

/// Runs several factories against one context, so their nodes share the
/// participant and use the in-process path where QoS allows.
Result<std::vector<std::shared_ptr<Node>>> compose(Context& ctx,
                                                   const std::vector<NodeFactory>& factories);

/// Named factories for run-time assembly (CLI `run` and the demos).
class ComponentRegistry {
 public:
  static ComponentRegistry& instance();

  void add(const std::string& name, NodeFactory factory);
  Result<std::shared_ptr<Node>> instantiate(const std::string& name, Context& ctx) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, NodeFactory> factories_;
};

/// Registers the bundled demo components: talker, listener, adder, countdown.
void register_demo_components();

}  // namespace mbus::core
