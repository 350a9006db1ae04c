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

#include "mbus/core/context.hpp"

namespace mbus::tooling {

// ---------------------------------------------------------------- perf -----

enum class PerfMode : uint8_t { InterProcess = 0, SingleProcess = 1, IntraProcess = 2 };
const char* perf_mode_name(PerfMode m);  // INTER_PROCESS / SINGLE_PROCESS / INTRA_PROCESS

/// Message sizes matching the published experiment's x-axis ticks.
std::vector<size_t> default_perf_sizes();  // 1k 4k 16k 32k 60k 512k 1m 2m 4m 8m

struct PerfConfig {
  PerfMode mode = PerfMode::IntraProcess;
  std::vector<size_t> sizes = default_perf_sizes();
  double rate_hz = 1000.0;
  double duration_s = 3.0;
  transport::QosProfile qos = transport::QosProfile::reliable_keep_all();
  std::string worker_exe;  // INTER_PROCESS publisher child (path to the CLI)
  size_t warmup = 5;       // leading samples dropped from latency stats
};

struct PerfSizeResult {
  size_t size_bytes = 0;
  double mean_latency_ms = 0;
  double median_latency_ms = 0;
  double p95_latency_ms = 0;
  double rate_hz = 0;      // achieved publish rate
  double cpu_percent = 0;  // process CPU time / wall time, best-effort
  uint64_t sent = 0;
  uint64_t received = 0;
  std::vector<double> samples_ms;  // kept for acceptance-level statistics
};

struct PerfResult {
  PerfMode mode{};
  std::vector<PerfSizeResult> rows;
};

Result<PerfResult> perf_run(const PerfConfig& config);

/// CSV with the stable header row:
/// size_bytes,mode,mean_latency_ms,p95_latency_ms,rate_hz,cpu_percent
std::string perf_csv(const PerfResult& result);
extern const char* kPerfCsvHeader;

/// Child-process entry for INTER_PROCESS mode (hidden CLI subcommand).
int perf_worker_main(const std::string& peer, size_t size, double rate_hz, double duration_s,
                     uint64_t expected_min_received);

// ---------------------------------------------------------------- loss -----

struct LossConfig {
  std::vector<double> loss_percents{0, 10, 20};
  double bandwidth_bps = 54e6;     // 54 Mbps cap
  size_t message_size = 1000;      // serialized payload bytes
  double rate_hz = 29.0;
  double duration_s = 15.0;
  double grace_s = 2.0;            // post-run drain window
  uint64_t seed = 42;
  std::string worker_exe;
};

struct LossSecond {
  int second = 0;  // 1-based
  uint64_t sent = 0;
  uint64_t received = 0;
};

struct LossRun {
  double loss_percent = 0;
  std::vector<LossSecond> per_second;
  uint64_t total_sent = 0;
  uint64_t total_received = 0;
};

/// One publisher and one subscription in separate processes through the
/// deterministic impairment layer, RELIABLE QoS; per-second tallies.
Result<std::vector<LossRun>> loss_run(const LossConfig& config);

/// CSV: loss_percent,second,sent,received
std::string loss_csv(const std::vector<LossRun>& runs);
extern const char* kLossCsvHeader;

/// Child-process entry: publisher side of a loss run.
int loss_worker_main(const std::string& peer, size_t size, double rate_hz, double duration_s,
                     double grace_s, double drop_probability, double bandwidth_bps,
                     uint64_t seed);

// ------------------------------------------------------------- helpers -----

/// perf/Sample wire image: seq (u64), stamp_mono_ns (u64), pad (u32 len +
/// bytes). total size == `size` for size >= 20.
Bytes encode_perf_sample(uint64_t seq, uint64_t stamp_mono_ns, size_t size);
struct PerfSample {
  uint64_t seq = 0;
  uint64_t stamp_mono_ns = 0;
};
Result<PerfSample> decode_perf_sample(BytesView payload);

/// Publish rate measurement for `topic hz`.
Result<double> measure_topic_hz(core::Context& ctx, const std::string& topic, Duration window,
                                Duration discovery_timeout = std::chrono::seconds(5));

/// Spawns argv[0]=exe with args, captures stdout; returns (exit code, stdout).
Result<std::pair<int, std::string>> run_subprocess(const std::string& exe,
                                                   const std::vector<std::string>& args,
                                                   Duration timeout);

double process_cpu_seconds();  // utime+stime of this process

}  // namespace mbus::tooling
