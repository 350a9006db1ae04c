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
#include <memory>

#include "mbus/core/context.hpp"

namespace mbus::core {

/// Deterministic in-process network: datagrams route between participants on
/// one thread under a manually advanced clock. Impairment still applies at
/// each receiving participant, so lossy experiments replay bit-identically.
class SimNetwork {
 public:
  SimNetwork();

  std::shared_ptr<SimClock> clock() { return clock_; }
  MonoTime now() const { return clock_->now(); }

  /// Creates a participant attached to this network.
  Result<std::shared_ptr<Context>> create_context(const ContextConfig& cfg);

  /// Advances simulated time, delivering datagrams and spinning every
  /// participant as events come due. Returns items executed.
  size_t run_for(Duration d);

  /// Spins without advancing time until nothing is immediately ready.
  size_t settle();

  /// run_for until the predicate holds; false on timeout.
  bool run_until(const std::function<bool()>& pred, Duration timeout);

 private:
  class Link;
  friend class Link;

  void route(const Locator& to, BytesView datagram, const Locator& from);
  void route_multicast(BytesView datagram, const Locator& from);

  std::shared_ptr<SimClock> clock_;
  uint16_t next_port_ = 1;
  std::map<Locator, DatagramLink::Sink*> sinks_;
  struct Registration {
    std::unique_ptr<DatagramLink::Sink> sink;
  };
  std::map<Locator, Registration> registrations_;
  std::vector<std::weak_ptr<Context>> contexts_;
};

}  // namespace mbus::core
