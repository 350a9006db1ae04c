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

#include <cstdint>
#include <optional>
#include <random>

#include "mbus/time.hpp"

namespace mbus::transport {

/// Deterministic network impairment applied to inbound datagrams. Same seed
/// and traffic order => same drop decisions, so lossy experiments reproduce
/// exactly in CI.
struct ImpairmentConfig {
  bool enabled = false;
  double drop_probability = 0.0;              // [0, 1]
  std::optional<double> bandwidth_bps{};      // token-bucket cap; absent = unlimited
  Duration added_latency{0};
  uint64_t rng_seed = 0;
};

class Impairment {
 public:
  explicit Impairment(const ImpairmentConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {}

  struct Decision {
    bool deliver = true;
    MonoTime at{};  // valid when deliver
  };

  /// One RNG draw per datagram in arrival order, regardless of probability,
  /// so decision streams are reproducible for any p. Queuing delay under a
  /// bandwidth cap models serialized transmission: each datagram occupies the
  /// link for size*8/bps after the link frees up.
  Decision apply(size_t datagram_size, MonoTime now) {
    Decision d;
    double u = uniform01();
    if (u < cfg_.drop_probability) {
      d.deliver = false;
      return d;
    }
    MonoTime start = now;
    if (cfg_.bandwidth_bps) {
      if (busy_until_ > start) start = busy_until_;
      auto tx_ns = static_cast<int64_t>(static_cast<double>(datagram_size) * 8.0 * 1e9 /
                                        *cfg_.bandwidth_bps);
      busy_until_ = start + Duration(tx_ns);
      start = busy_until_;
    }
    d.at = start + cfg_.added_latency;
    return d;
  }

  const ImpairmentConfig& config() const { return cfg_; }

 private:
  // 53-bit mapping: explicit, unlike std distributions, so decisions are
  // identical across standard libraries.
  double uniform01() { return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0); }

  ImpairmentConfig cfg_;
  std::mt19937_64 rng_;
  MonoTime busy_until_{};
};

}  // namespace mbus::transport
