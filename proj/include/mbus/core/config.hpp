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

#include <string>
#include <vector>

#include "mbus/result.hpp"
#include "mbus/time.hpp"
#include "mbus/transport/impairment.hpp"

namespace mbus::core {

/// Participant configuration. Loadable from a key=value file; every key has
/// an MBUS_* environment override (see apply_env_overrides and docs/config.md).
struct ContextConfig {
  uint32_t domain_id = 0;

  // in-process delivery
  bool intra_process = true;

  // networking
  bool multicast = true;
  std::string advertise_address = "127.0.0.1";
  uint16_t bind_port = 0;  // 0: ephemeral
  std::vector<std::string> static_peers;  // "ip:port" entries
  size_t socket_buffer_bytes = 1u << 20;
  size_t max_fragment = 1200;
  size_t max_burst_fragments = 64;           // fragment pacing under small kernel buffers
  Duration burst_interval = std::chrono::microseconds(200);

  // impairment (inbound; deterministic)
  transport::ImpairmentConfig impairment;

  // security
  bool security = false;
  std::string keystore;
  std::string identity;
  bool security_enforce_local = true;  // diagnostic hook: rogue peers skip local checks

  // protocol timing
  Duration announce_period = std::chrono::seconds(1);
  Duration lease_duration = std::chrono::seconds(3);
  Duration heartbeat_period = std::chrono::milliseconds(100);
  Duration reassembly_timeout = std::chrono::seconds(2);
  Duration service_timeout = std::chrono::seconds(5);

  size_t keep_all_high_water = 64u << 20;

  // tooling convenience
  std::string schema_path;
};

/// Key=value parser ('#' comments). Unknown keys are errors.
Result<ContextConfig> load_config_file(const std::string& path);
Status apply_config_line(ContextConfig& cfg, const std::string& key, const std::string& value);

/// MBUS_* environment overrides, mirroring every file key.
void apply_env_overrides(ContextConfig& cfg);

/// Defaults + environment.
ContextConfig default_config();

/// Discovery multicast group and per-domain port convention.
inline constexpr const char* kDiscoveryGroup = "239.255.77.66";
inline uint16_t discovery_port(uint32_t domain_id) {
  return static_cast<uint16_t>(47400 + 4 * (domain_id % 200));
}

}  // namespace mbus::core
