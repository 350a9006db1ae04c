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

#include "mbus/tooling/bench.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "mbus/interfaces/schema.hpp"

namespace mbus::tooling {

using nlohmann::json;

namespace {
constexpr const char* kBenchTopic = "/bench/data";
constexpr size_t kSampleOverhead = 20;  // seq(8) + stamp(8) + pad length prefix(4)

const interfaces::TypeDescriptorPtr& bench_type() {
  static const interfaces::TypeDescriptorPtr type =
      interfaces::builtin_schemas().find("perf/Sample");
  return type;
}

uint64_t bench_type_hash() { return bench_type()->hash(); }

interfaces::MessageValue make_perf_message(uint64_t seq, uint64_t stamp_mono_ns, size_t size) {
  interfaces::MessageValue msg(bench_type());
  (void)msg.set("seq", interfaces::Value(interfaces::Primitive(seq)));
  (void)msg.set("stamp_mono_ns", interfaces::Value(interfaces::Primitive(stamp_mono_ns)));
  size_t pad = size >= kSampleOverhead ? size - kSampleOverhead : 0;
  (void)msg.set("pad", interfaces::Value(interfaces::Primitive(std::string(pad, '\xa5'))));
  return msg;
}

PerfSample read_perf_message(const interfaces::MessageValue& msg) {
  PerfSample s;
  if (const auto* v = msg.get("seq"))
    if (const auto* p = std::get_if<interfaces::Primitive>(&v->data))
      if (const auto* u = std::get_if<uint64_t>(p)) s.seq = *u;
  if (const auto* v = msg.get("stamp_mono_ns"))
    if (const auto* p = std::get_if<interfaces::Primitive>(&v->data))
      if (const auto* u = std::get_if<uint64_t>(p)) s.stamp_mono_ns = *u;
  return s;
}

struct LatencyStats {
  double mean_ms = 0, median_ms = 0, p95_ms = 0;
};

LatencyStats latency_stats(std::vector<double> samples_ms) {
  LatencyStats stats;
  if (samples_ms.empty()) return stats;
  double sum = 0;
  for (double s : samples_ms) sum += s;
  stats.mean_ms = sum / static_cast<double>(samples_ms.size());
  std::sort(samples_ms.begin(), samples_ms.end());
  stats.median_ms = samples_ms[samples_ms.size() / 2];
  size_t p95_index = static_cast<size_t>(
      std::min<double>(static_cast<double>(samples_ms.size()) - 1,
                       std::ceil(0.95 * static_cast<double>(samples_ms.size())) - 1));
  stats.p95_ms = samples_ms[p95_index];
  return stats;
}

}  // namespace

const char* kPerfCsvHeader = "size_bytes,mode,mean_latency_ms,p95_latency_ms,rate_hz,cpu_percent";
const char* kLossCsvHeader = "loss_percent,second,sent,received";

const char* perf_mode_name(PerfMode m) {
  switch (m) {
    case PerfMode::InterProcess: return "INTER_PROCESS";
    case PerfMode::SingleProcess: return "SINGLE_PROCESS";
    case PerfMode::IntraProcess: return "INTRA_PROCESS";
  }
  return "?";
}

std::vector<size_t> default_perf_sizes() {
  return {1u << 10,  4u << 10,  16u << 10, 32u << 10, 60u << 10,
          512u << 10, 1u << 20, 2u << 20,  4u << 20,  8u << 20};
}

Bytes encode_perf_sample(uint64_t seq, uint64_t stamp_mono_ns, size_t size) {
  size_t pad = size >= kSampleOverhead ? size - kSampleOverhead : 0;
  ByteWriter w(kSampleOverhead + pad);
  w.u64(seq);
  w.u64(stamp_mono_ns);
  w.u32(static_cast<uint32_t>(pad));
  Bytes padding(pad, 0xA5);
  w.raw(padding);
  return w.take();
}

Result<PerfSample> decode_perf_sample(BytesView payload) {
  if (payload.size() < kSampleOverhead)
    return Error{Errc::decode_error, "short perf sample"};
  ByteReader r(payload);
  PerfSample s;
  s.seq = r.u64();
  s.stamp_mono_ns = r.u64();
  return s;
}

double process_cpu_seconds() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  auto seconds = [](const timeval& tv) {
    return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) * 1e-6;
  };
  return seconds(usage.ru_utime) + seconds(usage.ru_stime);
}

Result<std::pair<int, std::string>> run_subprocess(const std::string& exe,
                                                   const std::vector<std::string>& args,
                                                   Duration timeout) {
  int pipefd[2];
  if (pipe(pipefd) != 0) return Error{Errc::io_error, "pipe() failed"};
  pid_t pid = fork();
  if (pid < 0) return Error{Errc::io_error, "fork() failed"};
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(exe.c_str()));
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(exe.c_str(), argv.data());
    _exit(127);
  }
  close(pipefd[1]);
  std::string output;
  char buf[4096];
  MonoTime deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{pipefd[0], POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(std::min<int64_t>(left.count(), 500)));
    if (rc < 0) break;
    if (rc == 0) continue;
    ssize_t n = read(pipefd[0], buf, sizeof buf);
    if (n <= 0) break;  // EOF: child closed stdout
    output.append(buf, static_cast<size_t>(n));
  }
  close(pipefd[0]);
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    return Error{Errc::timeout, exe + " timed out"};
  }
  int status = 0;
  waitpid(pid, &status, 0);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
  return std::make_pair(code, std::move(output));
}

// ------------------------------------------------------------------ perf ---

namespace {

struct SubscriberSide {
  std::shared_ptr<core::Subscription> sub;
  std::vector<double> samples_ms;
  uint64_t received = 0;
  uint64_t max_seq = 0;
};

Result<std::shared_ptr<SubscriberSide>> make_perf_subscriber(
    core::Context& ctx, core::Node& node, const transport::QosProfile& qos, size_t warmup) {
  auto side = std::make_shared<SubscriberSide>();
  auto sub = node.create_subscription(
      kBenchTopic, bench_type(), qos,
      [side, &ctx, warmup](const interfaces::MessageValue& msg, const core::MessageInfo&) {
        PerfSample sample = read_perf_message(msg);
        ++side->received;
        side->max_seq = std::max(side->max_seq, sample.seq);
        if (sample.seq <= warmup) return;
        double ms = static_cast<double>(to_ns(ctx.clock().now()) -
                                        static_cast<int64_t>(sample.stamp_mono_ns)) /
                    1e6;
        side->samples_ms.push_back(ms);
      });
  if (!sub.ok()) return sub.error();
  side->sub = sub.value();
  return side;
}

struct PublisherStats {
  uint64_t sent = 0;
  double achieved_rate = 0;
};

/// Paced publish loop with reliable backpressure; spins the context between
/// deadlines so the same thread serves subscriber callbacks and acks.
Result<PublisherStats> run_publisher(core::Context& ctx, core::Publisher& pub, size_t size,
                                     double rate_hz, double duration_s) {
  PublisherStats stats;
  auto period = Duration(static_cast<int64_t>(1e9 / rate_hz));
  MonoTime start = ctx.clock().now();
  MonoTime end = start + Duration(static_cast<int64_t>(duration_s * 1e9));
  MonoTime deadline = start;
  uint64_t seq = 0;
  while (ctx.clock().now() < end) {
    deadline += period;
    auto message = make_perf_message(++seq, static_cast<uint64_t>(to_ns(ctx.clock().now())),
                                     size);
    for (;;) {
      auto st = pub.publish(std::move(message));
      if (st.ok()) {
        ++stats.sent;
        break;
      }
      if (st.code() != Errc::resource_exhausted) return st.error();
      // cache full: drain acknowledgements, then retry the same sequence
      message = make_perf_message(seq, static_cast<uint64_t>(to_ns(ctx.clock().now())), size);
      ctx.spin_once(std::chrono::milliseconds(1));
      if (ctx.clock().now() >= end) break;
    }
    // Hybrid pacing: a coarse wait, then a short busy-poll; cv timeouts alone
    // overshoot by ~5-10% of a millisecond period.
    constexpr Duration kBusyWindow = std::chrono::microseconds(150);
    for (;;) {
      MonoTime now = ctx.clock().now();
      if (now >= deadline || now >= end) break;
      Duration left = deadline - now;
      ctx.spin_once(left > kBusyWindow ? left - kBusyWindow : Duration::zero());
    }
    if (deadline + period < ctx.clock().now()) deadline = ctx.clock().now();  // no bursts
  }
  double elapsed = static_cast<double>(to_ns(ctx.clock().now() - start)) / 1e9;
  stats.achieved_rate = elapsed > 0 ? static_cast<double>(stats.sent) / elapsed : 0;
  return stats;
}

void drain(core::Context& ctx, core::Publisher* pub, Duration grace) {
  MonoTime end = ctx.clock().now() + grace;
  while (ctx.clock().now() < end) {
    if (pub && pub->fully_acked()) return;
    ctx.spin_once(std::chrono::milliseconds(5));
  }
}

// Loopback benchmarking uses link-sized fragments, as the DDS stacks this
// mirrors do on one host: the loopback MTU is 64 KiB and per-datagram cost
// dominates throughput. The wire default elsewhere stays 1200 bytes.
void apply_loopback_tuning(core::ContextConfig& ccfg) {
  ccfg.max_fragment = 60000;
  ccfg.max_burst_fragments = 6;  // 6 x 60 KB stays inside the kernel rcvbuf
  ccfg.burst_interval = std::chrono::microseconds(200);
  ccfg.socket_buffer_bytes = 4u << 20;  // kernel caps apply
}

Result<PerfSizeResult> perf_same_process(const PerfConfig& cfg, size_t size, bool intra) {
  core::ContextConfig ccfg;
  ccfg.intra_process = intra;
  ccfg.multicast = false;  // self-contained: no discovery beyond this context
  apply_loopback_tuning(ccfg);
  auto ctx = core::Context::create(ccfg);
  if (!ctx.ok()) return ctx.error();

  auto pub_node = ctx.value()->create_node("perf_pub").value();
  auto sub_node = ctx.value()->create_node("perf_sub").value();
  auto side = make_perf_subscriber(*ctx.value(), *sub_node, cfg.qos, cfg.warmup);
  if (!side.ok()) return side.error();
  auto pub = pub_node->create_publisher(kBenchTopic, bench_type(), cfg.qos);
  if (!pub.ok()) return pub.error();

  if (!core::spin_until(*ctx.value(), [&] { return pub.value()->matched_count() > 0; },
                        std::chrono::seconds(5)))
    return Error{Errc::timeout, "perf endpoints did not match"};

  double cpu_before = process_cpu_seconds();
  MonoTime wall_before = ctx.value()->clock().now();
  auto pub_stats = run_publisher(*ctx.value(), *pub.value(), size, cfg.rate_hz, cfg.duration_s);
  if (!pub_stats.ok()) return pub_stats.error();
  drain(*ctx.value(), pub.value().get(), std::chrono::seconds(2));
  double cpu_used = process_cpu_seconds() - cpu_before;
  double wall = static_cast<double>(to_ns(ctx.value()->clock().now() - wall_before)) / 1e9;

  if (cfg.qos.reliability == transport::Reliability::Reliable &&
      side.value()->received < pub_stats.value().sent)
    return Error{Errc::partial_result,
                 "run aborted or incomplete: received " +
                     std::to_string(side.value()->received) + " of " +
                     std::to_string(pub_stats.value().sent)};

  PerfSizeResult row;
  row.size_bytes = size;
  row.sent = pub_stats.value().sent;
  row.received = side.value()->received;
  row.rate_hz = pub_stats.value().achieved_rate;
  row.cpu_percent = wall > 0 ? 100.0 * cpu_used / wall : 0;
  auto stats = latency_stats(side.value()->samples_ms);
  row.mean_latency_ms = stats.mean_ms;
  row.median_latency_ms = stats.median_ms;
  row.p95_latency_ms = stats.p95_ms;
  row.samples_ms = std::move(side.value()->samples_ms);
  return row;
}

Result<PerfSizeResult> perf_inter_process(const PerfConfig& cfg, size_t size) {
  if (cfg.worker_exe.empty())
    return Error{Errc::validation_error, "INTER_PROCESS mode needs a worker executable"};
  core::ContextConfig ccfg;
  ccfg.multicast = false;
  apply_loopback_tuning(ccfg);
  auto ctx = core::Context::create(ccfg);
  if (!ctx.ok()) return ctx.error();
  auto sub_node = ctx.value()->create_node("perf_sub").value();
  auto side = make_perf_subscriber(*ctx.value(), *sub_node, cfg.qos, cfg.warmup);
  if (!side.ok()) return side.error();

  double cpu_before = process_cpu_seconds();
  MonoTime wall_before = ctx.value()->clock().now();

  std::string peer = ctx.value()->local_locator().str();
  std::vector<std::string> args = {"perf-worker",
                                   "--peer", peer,
                                   "--size", std::to_string(size),
                                   "--rate", std::to_string(cfg.rate_hz),
                                   "--duration", std::to_string(cfg.duration_s)};

  // Spin the subscriber while the child publishes. The child runs for
  // duration + match + drain; poll it from a worker thread-free loop.
  std::string output;
  int exit_code = -1;
  {
    // run the child while spinning: fork/exec, then interleave spin and poll
    int pipefd[2];
    if (pipe(pipefd) != 0) return Error{Errc::io_error, "pipe() failed"};
    pid_t pid = fork();
    if (pid < 0) return Error{Errc::io_error, "fork() failed"};
    if (pid == 0) {
      dup2(pipefd[1], STDOUT_FILENO);
      close(pipefd[0]);
      close(pipefd[1]);
      std::vector<char*> argv;
      argv.push_back(const_cast<char*>(cfg.worker_exe.c_str()));
      for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execv(cfg.worker_exe.c_str(), argv.data());
      _exit(127);
    }
    close(pipefd[1]);
    MonoTime deadline = ctx.value()->clock().now() +
                        Duration(static_cast<int64_t>((cfg.duration_s + 20) * 1e9));
    char buf[4096];
    bool eof = false;
    while (!eof && ctx.value()->clock().now() < deadline) {
      ctx.value()->spin_once(std::chrono::milliseconds(1));
      pollfd pfd{pipefd[0], POLLIN, 0};
      while (poll(&pfd, 1, 0) > 0) {
        ssize_t n = read(pipefd[0], buf, sizeof buf);
        if (n <= 0) {
          eof = true;
          break;
        }
        output.append(buf, static_cast<size_t>(n));
      }
    }
    close(pipefd[0]);
    if (!eof) kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
  }
  if (exit_code != 0)
    return Error{Errc::partial_result, "perf worker failed (exit " +
                                           std::to_string(exit_code) + ")"};

  // allow stragglers to arrive
  MonoTime settle_end = ctx.value()->clock().now() + std::chrono::milliseconds(500);
  while (ctx.value()->clock().now() < settle_end)
    ctx.value()->spin_once(std::chrono::milliseconds(5));

  double cpu_used = process_cpu_seconds() - cpu_before;
  double wall = static_cast<double>(to_ns(ctx.value()->clock().now() - wall_before)) / 1e9;

  // parse the worker's summary line
  json summary;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("PERFWORKER ", 0) == 0) {
      summary = json::parse(line.substr(11), nullptr, false);
    }
  }
  if (summary.is_discarded() || summary.is_null())
    return Error{Errc::partial_result, "perf worker produced no summary"};

  uint64_t sent = summary.value("sent", 0ULL);
  if (cfg.qos.reliability == transport::Reliability::Reliable && side.value()->received < sent)
    return Error{Errc::partial_result,
                 "run aborted or incomplete: received " +
                     std::to_string(side.value()->received) + " of " + std::to_string(sent)};

  PerfSizeResult row;
  row.size_bytes = size;
  row.sent = sent;
  row.received = side.value()->received;
  row.rate_hz = summary.value("rate_hz", 0.0);
  row.cpu_percent =
      (wall > 0 ? 100.0 * cpu_used / wall : 0) + summary.value("cpu_percent", 0.0);
  auto stats = latency_stats(side.value()->samples_ms);
  row.mean_latency_ms = stats.mean_ms;
  row.median_latency_ms = stats.median_ms;
  row.p95_latency_ms = stats.p95_ms;
  row.samples_ms = std::move(side.value()->samples_ms);
  return row;
}

}  // namespace

Result<PerfResult> perf_run(const PerfConfig& config) {
  PerfResult result;
  result.mode = config.mode;
  for (size_t size : config.sizes) {
    Result<PerfSizeResult> row =
        config.mode == PerfMode::InterProcess
            ? perf_inter_process(config, size)
            : perf_same_process(config, size, config.mode == PerfMode::IntraProcess);
    if (!row.ok()) return row.error();
    result.rows.push_back(std::move(row.value()));
  }
  return result;
}

std::string perf_csv(const PerfResult& result) {
  std::ostringstream out;
  out << kPerfCsvHeader << "\n";
  for (const auto& row : result.rows) {
    out << row.size_bytes << "," << perf_mode_name(result.mode) << "," << row.mean_latency_ms
        << "," << row.p95_latency_ms << "," << row.rate_hz << "," << row.cpu_percent << "\n";
  }
  return out.str();
}

int perf_worker_main(const std::string& peer, size_t size, double rate_hz, double duration_s,
                     uint64_t expected_min_received) {
  (void)expected_min_received;
  core::ContextConfig ccfg;
  ccfg.multicast = false;
  ccfg.static_peers = {peer};
  apply_loopback_tuning(ccfg);
  auto ctx = core::Context::create(ccfg);
  if (!ctx.ok()) return 2;
  auto node = ctx.value()->create_node("perf_worker_pub");
  if (!node.ok()) return 2;
  auto pub = node.value()->create_publisher(kBenchTopic, bench_type(),
                                            transport::QosProfile::reliable_keep_all());
  if (!pub.ok()) return 2;
  if (!core::spin_until(*ctx.value(), [&] { return pub.value()->matched_count() > 0; },
                        std::chrono::seconds(5)))
    return 2;

  double cpu_before = process_cpu_seconds();
  MonoTime wall_before = ctx.value()->clock().now();
  auto stats = run_publisher(*ctx.value(), *pub.value(), size, rate_hz, duration_s);
  if (!stats.ok()) return 2;
  drain(*ctx.value(), pub.value().get(), std::chrono::seconds(2));
  double cpu = process_cpu_seconds() - cpu_before;
  double wall = static_cast<double>(to_ns(ctx.value()->clock().now() - wall_before)) / 1e9;

  json summary;
  summary["sent"] = stats.value().sent;
  summary["rate_hz"] = stats.value().achieved_rate;
  summary["cpu_percent"] = wall > 0 ? 100.0 * cpu / wall : 0.0;
  std::printf("PERFWORKER %s\n", summary.dump().c_str());
  std::fflush(stdout);
  return 0;
}

// ------------------------------------------------------------------ loss ---

namespace {

Result<LossRun> loss_one(const LossConfig& cfg, double loss_percent) {
  core::ContextConfig ccfg;
  ccfg.multicast = false;
  ccfg.impairment.enabled = true;
  ccfg.impairment.drop_probability = loss_percent / 100.0;
  ccfg.impairment.bandwidth_bps = cfg.bandwidth_bps;
  ccfg.impairment.rng_seed = cfg.seed;
  auto ctx = core::Context::create(ccfg);
  if (!ctx.ok()) return ctx.error();
  auto node = ctx.value()->create_node("loss_sub");
  if (!node.ok()) return node.error();

  struct Tally {
    std::vector<std::pair<int64_t, uint64_t>> arrivals;  // (arrival mono ns, stamp)
  };
  auto tally = std::make_shared<Tally>();
  auto sub = node.value()->create_raw_subscription(
      kBenchTopic, "perf/Sample", bench_type_hash(),
      transport::QosProfile::reliable_keep_all(),
      [tally, raw_ctx = ctx.value().get()](BytesView payload, const core::MessageInfo&) {
        auto sample = decode_perf_sample(payload);
        if (!sample.ok()) return;
        tally->arrivals.emplace_back(to_ns(raw_ctx->clock().now()),
                                     sample.value().stamp_mono_ns);
      });
  if (!sub.ok()) return sub.error();

  std::string peer = ctx.value()->local_locator().str();
  std::vector<std::string> args = {"loss-worker",
                                   "--peer", peer,
                                   "--size", std::to_string(cfg.message_size),
                                   "--rate", std::to_string(cfg.rate_hz),
                                   "--duration", std::to_string(cfg.duration_s),
                                   "--grace", std::to_string(cfg.grace_s),
                                   "--drop", std::to_string(loss_percent / 100.0),
                                   "--bandwidth", std::to_string(cfg.bandwidth_bps),
                                   "--seed", std::to_string(cfg.seed + 1)};

  int pipefd[2];
  if (pipe(pipefd) != 0) return Error{Errc::io_error, "pipe() failed"};
  pid_t pid = fork();
  if (pid < 0) return Error{Errc::io_error, "fork() failed"};
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cfg.worker_exe.c_str()));
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(cfg.worker_exe.c_str(), argv.data());
    _exit(127);
  }
  close(pipefd[1]);
  std::string output;
  char buf[4096];
  bool eof = false;
  MonoTime deadline = ctx.value()->clock().now() +
                      Duration(static_cast<int64_t>((cfg.duration_s + cfg.grace_s + 20) * 1e9));
  while (!eof && ctx.value()->clock().now() < deadline) {
    ctx.value()->spin_once(std::chrono::milliseconds(2));
    pollfd pfd{pipefd[0], POLLIN, 0};
    while (poll(&pfd, 1, 0) > 0) {
      ssize_t n = read(pipefd[0], buf, sizeof buf);
      if (n <= 0) {
        eof = true;
        break;
      }
      output.append(buf, static_cast<size_t>(n));
    }
  }
  close(pipefd[0]);
  if (!eof) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return Error{Errc::partial_result, "loss worker failed"};

  // final drain for retransmissions still in flight
  MonoTime drain_end =
      ctx.value()->clock().now() + Duration(static_cast<int64_t>(cfg.grace_s * 1e9 / 2));
  while (ctx.value()->clock().now() < drain_end)
    ctx.value()->spin_once(std::chrono::milliseconds(5));

  json summary;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("LOSSWORKER ", 0) == 0)
      summary = json::parse(line.substr(11), nullptr, false);
  if (summary.is_discarded() || summary.is_null())
    return Error{Errc::partial_result, "loss worker produced no summary"};

  LossRun run;
  run.loss_percent = loss_percent;
  std::vector<uint64_t> sent_buckets = summary.value("sent_per_second",
                                                     std::vector<uint64_t>{});
  run.total_sent = summary.value("total", 0ULL);

  // Arrival buckets relative to the first send stamp; CLOCK_MONOTONIC is
  // shared across processes on one host, and retransmitted samples carry
  // their original stamp, so min(stamp) is the run origin.
  uint64_t t0 = UINT64_MAX;
  for (const auto& [arrival, stamp] : tally->arrivals) t0 = std::min(t0, stamp);
  size_t n_seconds = sent_buckets.size() +
                     static_cast<size_t>(std::ceil(cfg.grace_s)) + 1;
  std::vector<uint64_t> received_buckets(n_seconds, 0);
  for (const auto& [arrival, stamp] : tally->arrivals) {
    auto bucket = static_cast<size_t>((static_cast<uint64_t>(arrival) - t0) / 1'000'000'000ULL);
    if (bucket >= received_buckets.size()) bucket = received_buckets.size() - 1;
    ++received_buckets[bucket];
  }
  run.total_received = tally->arrivals.size();
  for (size_t i = 0; i < n_seconds; ++i) {
    LossSecond second;
    second.second = static_cast<int>(i) + 1;
    second.sent = i < sent_buckets.size() ? sent_buckets[i] : 0;
    second.received = received_buckets[i];
    run.per_second.push_back(second);
  }
  return run;
}

}  // namespace

Result<std::vector<LossRun>> loss_run(const LossConfig& config) {
  if (config.worker_exe.empty())
    return Error{Errc::validation_error, "loss runs need a worker executable"};
  std::vector<LossRun> runs;
  for (double percent : config.loss_percents) {
    auto run = loss_one(config, percent);
    if (!run.ok()) return run.error();
    runs.push_back(std::move(run.value()));
  }
  return runs;
}

std::string loss_csv(const std::vector<LossRun>& runs) {
  std::ostringstream out;
  out << kLossCsvHeader << "\n";
  for (const auto& run : runs)
    for (const auto& second : run.per_second)
      out << run.loss_percent << "," << second.second << "," << second.sent << ","
          << second.received << "\n";
  return out.str();
}

int loss_worker_main(const std::string& peer, size_t size, double rate_hz, double duration_s,
                     double grace_s, double drop_probability, double bandwidth_bps,
                     uint64_t seed) {
  core::ContextConfig ccfg;
  ccfg.multicast = false;
  ccfg.static_peers = {peer};
  ccfg.impairment.enabled = true;  // the return path (acknacks) is lossy too
  ccfg.impairment.drop_probability = drop_probability;
  ccfg.impairment.bandwidth_bps = bandwidth_bps;
  ccfg.impairment.rng_seed = seed;
  auto ctx = core::Context::create(ccfg);
  if (!ctx.ok()) return 2;
  auto node = ctx.value()->create_node("loss_pub");
  if (!node.ok()) return 2;
  auto pub = node.value()->create_raw_publisher(
      kBenchTopic, "perf/Sample", bench_type_hash(), transport::QosProfile::reliable_keep_all());
  if (!pub.ok()) return 2;
  if (!core::spin_until(*ctx.value(), [&] { return pub.value()->matched_count() > 0; },
                        std::chrono::seconds(5)))
    return 2;

  auto period = Duration(static_cast<int64_t>(1e9 / rate_hz));
  MonoTime start = ctx.value()->clock().now();
  MonoTime end = start + Duration(static_cast<int64_t>(duration_s * 1e9));
  MonoTime deadline = start;
  uint64_t seq = 0;
  std::vector<uint64_t> sent_per_second(static_cast<size_t>(std::ceil(duration_s)), 0);
  while (ctx.value()->clock().now() < end) {
    deadline += period;
    MonoTime now = ctx.value()->clock().now();
    auto payload = encode_perf_sample(++seq, static_cast<uint64_t>(to_ns(now)), size);
    if (pub.value()->publish_serialized(std::move(payload)).ok()) {
      auto bucket = static_cast<size_t>(to_ns(now - start) / 1'000'000'000LL);
      if (bucket < sent_per_second.size()) ++sent_per_second[bucket];
    }
    while (ctx.value()->clock().now() < deadline && ctx.value()->clock().now() < end) {
      Duration left = deadline - ctx.value()->clock().now();
      ctx.value()->spin_once(std::min(left, Duration(std::chrono::milliseconds(2))));
    }
  }
  // grace window: keep answering NACKs so every sample lands
  MonoTime grace_end =
      ctx.value()->clock().now() + Duration(static_cast<int64_t>(grace_s * 1e9));
  while (ctx.value()->clock().now() < grace_end) {
    if (pub.value()->fully_acked()) break;
    ctx.value()->spin_once(std::chrono::milliseconds(5));
  }

  uint64_t total = 0;
  for (uint64_t s : sent_per_second) total += s;
  json summary;
  summary["sent_per_second"] = sent_per_second;
  summary["total"] = total;
  std::printf("LOSSWORKER %s\n", summary.dump().c_str());
  std::fflush(stdout);
  return 0;
}

// ---------------------------------------------------------------- hz -------

Result<double> measure_topic_hz(core::Context& ctx, const std::string& raw_topic,
                                Duration window, Duration discovery_timeout) {
  auto node = ctx.create_node("hz_probe_" + std::to_string(::getpid() % 100000));
  if (!node.ok()) return node.error();
  std::string topic = node.value()->resolve(raw_topic);

  const discovery::EndpointInfo* offer = nullptr;
  MonoTime deadline = ctx.clock().now() + discovery_timeout;
  while (!offer) {
    for (const auto& ep : ctx.graph().endpoints_on_topic(topic))
      if (ep.direction == discovery::EndpointDirection::Publisher) offer = &ep;
    if (offer) break;
    if (ctx.clock().now() > deadline)
      return Error{Errc::not_found, "no publisher on topic '" + topic + "'"};
    ctx.spin_once(std::chrono::milliseconds(20));
  }

  transport::QosProfile qos;
  qos.reliability = offer->qos.reliability;
  qos.history = transport::History::KeepAll;
  auto count = std::make_shared<uint64_t>(0);
  auto sub = node.value()->create_raw_subscription(
      topic, offer->type_name, offer->type_hash, qos,
      [count](BytesView, const core::MessageInfo&) { ++*count; });
  if (!sub.ok()) return sub.error();

  // wait for the first message, then measure a full window
  MonoTime first_deadline = ctx.clock().now() + discovery_timeout;
  while (*count == 0 && ctx.clock().now() < first_deadline)
    ctx.spin_once(std::chrono::milliseconds(10));
  if (*count == 0) return Error{Errc::timeout, "no traffic on topic '" + topic + "'"};

  uint64_t base = *count;
  MonoTime start = ctx.clock().now();
  MonoTime end = start + window;
  while (ctx.clock().now() < end) ctx.spin_once(std::chrono::milliseconds(10));
  double elapsed = static_cast<double>(to_ns(ctx.clock().now() - start)) / 1e9;
  node.value()->destroy();
  return static_cast<double>(*count - base) / elapsed;
}

}  // namespace mbus::tooling
