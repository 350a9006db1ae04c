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

#include "mbus/core/sim_network.hpp"

namespace mbus::core {

namespace {
constexpr uint32_t kSimAddress = 0x0a000001;  // 10.0.0.1 for every sim participant
}

/// Link endpoint inside the simulated network: send() routes synchronously on
/// the driving thread; the owning context's sink applies impairment and
/// schedules delivery.
class SimNetwork::Link final : public DatagramLink {
 public:
  Link(SimNetwork& net, Locator local) : net_(net), local_(local) {}

  ~Link() override { close(); }

  Locator local() const override { return local_; }

  void send(const Locator& to, BytesView datagram) override {
    net_.route(to, datagram, local_);
  }

  bool multicast_available() const override { return true; }

  void send_multicast(BytesView datagram) override { net_.route_multicast(datagram, local_); }

  void set_sink(Sink sink) override {
    auto owned = std::make_unique<Sink>(std::move(sink));
    net_.registrations_[local_] = {std::move(owned)};
    net_.sinks_[local_] = net_.registrations_[local_].sink.get();
  }

  void close() override {
    net_.sinks_.erase(local_);
    net_.registrations_.erase(local_);
  }

 private:
  SimNetwork& net_;
  Locator local_;
};

SimNetwork::SimNetwork() : clock_(std::make_shared<SimClock>()) {}

Result<std::shared_ptr<Context>> SimNetwork::create_context(const ContextConfig& cfg) {
  Locator local{kSimAddress, next_port_++};
  auto link = std::make_unique<Link>(*this, local);
  ContextConfig adjusted = cfg;
  adjusted.advertise_address = "10.0.0.1";
  auto ctx = Context::create_with_link(adjusted, std::move(link), clock_);
  if (ctx.ok()) contexts_.push_back(ctx.value());
  return ctx;
}

void SimNetwork::route(const Locator& to, BytesView datagram, const Locator& from) {
  auto it = sinks_.find(to);
  if (it == sinks_.end()) return;  // unreachable participant: dropped
  (*it->second)(Bytes(datagram.begin(), datagram.end()), from);
}

void SimNetwork::route_multicast(BytesView datagram, const Locator& from) {
  // Snapshot: sinks may mutate while handlers run.
  std::vector<DatagramLink::Sink*> targets;
  for (auto& [loc, sink] : sinks_)
    if (loc != from) targets.push_back(sink);
  for (auto* sink : targets) (*sink)(Bytes(datagram.begin(), datagram.end()), from);
}

size_t SimNetwork::settle() {
  // Bounded: self-rescheduling work (long-running goals) would otherwise pin
  // the loop at one instant forever.
  size_t executed = 0;
  for (int round = 0; round < 64; ++round) {
    size_t n = 0;
    for (auto it = contexts_.begin(); it != contexts_.end();) {
      auto ctx = it->lock();
      if (!ctx) {
        it = contexts_.erase(it);
        continue;
      }
      n += ctx->spin_once(Duration::zero());
      ++it;
    }
    executed += n;
    if (n > 0) continue;
    // respin only while protocol work is immediately due (sends may have
    // scheduled zero-delay deliveries without executing callbacks)
    bool immediate = false;
    for (auto& weak : contexts_) {
      auto ctx = weak.lock();
      if (!ctx) continue;
      auto wake = ctx->next_wakeup();
      if (wake && *wake <= clock_->now()) immediate = true;
    }
    if (!immediate) break;
  }
  return executed;
}

size_t SimNetwork::run_for(Duration d) {
  MonoTime end = clock_->now() + d;
  size_t executed = settle();
  while (clock_->now() < end) {
    std::optional<MonoTime> next;
    for (auto& weak : contexts_) {
      auto ctx = weak.lock();
      if (!ctx) continue;
      auto wake = ctx->next_wakeup();
      if (wake && (!next || *wake < *next)) next = wake;
    }
    MonoTime target;
    if (!next) {
      target = end;
    } else if (*next <= clock_->now()) {
      // immediate work keeps feeding itself; advance by a quantum
      target = clock_->now() + std::chrono::milliseconds(1);
    } else {
      target = *next;
    }
    clock_->set(target > end ? end : target);
    executed += settle();
  }
  return executed;
}

bool SimNetwork::run_until(const std::function<bool()>& pred, Duration timeout) {
  MonoTime end = clock_->now() + timeout;
  settle();
  while (!pred()) {
    if (clock_->now() >= end) return pred();
    Duration slice = std::min<Duration>(std::chrono::milliseconds(50), end - clock_->now());
    run_for(slice);
  }
  return true;
}

}  // namespace mbus::core
