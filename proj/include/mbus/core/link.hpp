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

#include "mbus/bytes.hpp"
#include "mbus/core/locator.hpp"
#include "mbus/result.hpp"

namespace mbus::core {

/// The transport seam. One built-in UDP link ships; the simulated network
/// implements the same interface, so protocol code cannot tell them apart.
/// Inbound datagrams arrive through the sink, possibly from a separate
/// receive context; everything else runs on the owner context.
class DatagramLink {
 public:
  using Sink = std::function<void(Bytes datagram, Locator from)>;

  virtual ~DatagramLink() = default;

  virtual Locator local() const = 0;
  virtual void send(const Locator& to, BytesView datagram) = 0;

  /// One frame = (header bytes, payload bytes), concatenated on the wire.
  /// Batched so a fragmented message costs one syscall, not one per fragment.
  using Frame = std::pair<BytesView, BytesView>;
  virtual void send_batch(const Locator& to, const std::vector<Frame>& frames) {
    Bytes datagram;
    for (const auto& [header, payload] : frames) {
      datagram.assign(header.begin(), header.end());
      datagram.insert(datagram.end(), payload.begin(), payload.end());
      send(to, datagram);
    }
  }

  /// Discovery-only multicast. Links without it report unavailable and the
  /// participant falls back to its static peer list.
  virtual bool multicast_available() const { return false; }
  virtual void send_multicast(BytesView datagram) { (void)datagram; }

  virtual void set_sink(Sink sink) = 0;
  virtual void close() {}
};

struct ContextConfig;
Result<std::unique_ptr<DatagramLink>> open_udp_link(const ContextConfig& cfg);

}  // namespace mbus::core
