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

#include "mbus/core/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mbus::core {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

Result<bool> parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  return Error{Errc::validation_error, "expected boolean, got '" + v + "'"};
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Status apply_config_line(ContextConfig& cfg, const std::string& key, const std::string& value) {
  auto bool_into = [&](bool& slot) -> Status {
    auto b = parse_bool(value);
    if (!b.ok()) return b.error();
    slot = b.value();
    return {};
  };
  auto ms_into = [&](Duration& slot) -> Status {
    slot = std::chrono::milliseconds(std::strtoll(value.c_str(), nullptr, 10));
    if (slot <= Duration::zero())
      return Error{Errc::validation_error, key + " must be positive milliseconds"};
    return {};
  };

  if (key == "domain_id") {
    cfg.domain_id = static_cast<uint32_t>(std::strtoul(value.c_str(), nullptr, 10));
  } else if (key == "intra_process") {
    return bool_into(cfg.intra_process);
  } else if (key == "multicast") {
    return bool_into(cfg.multicast);
  } else if (key == "advertise_address") {
    cfg.advertise_address = value;
  } else if (key == "bind_port") {
    cfg.bind_port = static_cast<uint16_t>(std::strtoul(value.c_str(), nullptr, 10));
  } else if (key == "static_peers") {
    cfg.static_peers = split_csv(value);
  } else if (key == "socket_buffer_bytes") {
    cfg.socket_buffer_bytes = std::strtoull(value.c_str(), nullptr, 10);
  } else if (key == "max_fragment") {
    cfg.max_fragment = std::strtoull(value.c_str(), nullptr, 10);
  } else if (key == "max_burst_fragments") {
    cfg.max_burst_fragments = std::strtoull(value.c_str(), nullptr, 10);
  } else if (key == "burst_interval_us") {
    cfg.burst_interval = std::chrono::microseconds(std::strtoll(value.c_str(), nullptr, 10));
  } else if (key == "impair.enabled") {
    return bool_into(cfg.impairment.enabled);
  } else if (key == "impair.drop_probability") {
    cfg.impairment.drop_probability = std::strtod(value.c_str(), nullptr);
    cfg.impairment.enabled = true;
  } else if (key == "impair.bandwidth_bps") {
    cfg.impairment.bandwidth_bps = std::strtod(value.c_str(), nullptr);
    cfg.impairment.enabled = true;
  } else if (key == "impair.added_latency_ms") {
    cfg.impairment.added_latency =
        std::chrono::milliseconds(std::strtoll(value.c_str(), nullptr, 10));
    cfg.impairment.enabled = true;
  } else if (key == "impair.seed") {
    cfg.impairment.rng_seed = std::strtoull(value.c_str(), nullptr, 10);
  } else if (key == "security") {
    return bool_into(cfg.security);
  } else if (key == "keystore") {
    cfg.keystore = value;
  } else if (key == "identity") {
    cfg.identity = value;
  } else if (key == "security_enforce_local") {
    return bool_into(cfg.security_enforce_local);
  } else if (key == "announce_period_ms") {
    return ms_into(cfg.announce_period);
  } else if (key == "lease_ms") {
    return ms_into(cfg.lease_duration);
  } else if (key == "heartbeat_period_ms") {
    return ms_into(cfg.heartbeat_period);
  } else if (key == "reassembly_timeout_ms") {
    return ms_into(cfg.reassembly_timeout);
  } else if (key == "service_timeout_ms") {
    return ms_into(cfg.service_timeout);
  } else if (key == "keep_all_high_water") {
    cfg.keep_all_high_water = std::strtoull(value.c_str(), nullptr, 10);
  } else if (key == "schema_path") {
    cfg.schema_path = value;
  } else {
    return Error{Errc::validation_error, "unknown config key '" + key + "'"};
  }
  return {};
}

Result<ContextConfig> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{Errc::io_error, "cannot open config file " + path};
  ContextConfig cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      return Error{Errc::validation_error,
                   path + ":" + std::to_string(line_no) + ": expected key = value"};
    auto st = apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    if (!st.ok())
      return Error{st.error().code,
                   path + ":" + std::to_string(line_no) + ": " + st.error().message};
  }
  apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(ContextConfig& cfg) {
  // MBUS_IMPAIR_DROP_PROBABILITY mirrors impair.drop_probability, and so on.
  static constexpr std::pair<const char*, const char*> kMap[] = {
      {"MBUS_DOMAIN_ID", "domain_id"},
      {"MBUS_INTRA_PROCESS", "intra_process"},
      {"MBUS_MULTICAST", "multicast"},
      {"MBUS_ADVERTISE_ADDRESS", "advertise_address"},
      {"MBUS_BIND_PORT", "bind_port"},
      {"MBUS_STATIC_PEERS", "static_peers"},
      {"MBUS_SOCKET_BUFFER_BYTES", "socket_buffer_bytes"},
      {"MBUS_MAX_FRAGMENT", "max_fragment"},
      {"MBUS_MAX_BURST_FRAGMENTS", "max_burst_fragments"},
      {"MBUS_BURST_INTERVAL_US", "burst_interval_us"},
      {"MBUS_IMPAIR_ENABLED", "impair.enabled"},
      {"MBUS_IMPAIR_DROP_PROBABILITY", "impair.drop_probability"},
      {"MBUS_IMPAIR_BANDWIDTH_BPS", "impair.bandwidth_bps"},
      {"MBUS_IMPAIR_ADDED_LATENCY_MS", "impair.added_latency_ms"},
      {"MBUS_IMPAIR_SEED", "impair.seed"},
      {"MBUS_SECURITY", "security"},
      {"MBUS_KEYSTORE", "keystore"},
      {"MBUS_IDENTITY", "identity"},
      {"MBUS_SECURITY_ENFORCE_LOCAL", "security_enforce_local"},
      {"MBUS_ANNOUNCE_PERIOD_MS", "announce_period_ms"},
      {"MBUS_LEASE_MS", "lease_ms"},
      {"MBUS_HEARTBEAT_PERIOD_MS", "heartbeat_period_ms"},
      {"MBUS_REASSEMBLY_TIMEOUT_MS", "reassembly_timeout_ms"},
      {"MBUS_SERVICE_TIMEOUT_MS", "service_timeout_ms"},
      {"MBUS_KEEP_ALL_HIGH_WATER", "keep_all_high_water"},
      {"MBUS_SCHEMA_PATH", "schema_path"},
  };
  for (const auto& [env, key] : kMap) {
    const char* v = std::getenv(env);
    if (v && *v) (void)apply_config_line(cfg, key, v);
  }
}

ContextConfig default_config() {
  ContextConfig cfg;
  apply_env_overrides(cfg);
  return cfg;
}

}  // namespace mbus::core
