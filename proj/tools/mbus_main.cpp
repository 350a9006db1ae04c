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

// Operator CLI: graph introspection, topic pub/echo, service and lifecycle
// calls, bag record/replay, and the perf / loss benchmark harnesses.
// Exit codes: 0 ok, 1 user error, 2 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <iostream>

#include "mbus/core/composition.hpp"
#include "mbus/core/executor.hpp"
#include "mbus/interfaces/schema.hpp"
#include "mbus/mgmt/lifecycle.hpp"
#include "mbus/rpc/service.hpp"
#include "mbus/security/keystore.hpp"
#include "mbus/tooling/bag.hpp"
#include "mbus/tooling/bench.hpp"
#include "mbus/tooling/json_convert.hpp"

using namespace mbus;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kRuntimeError = 2;

volatile std::sig_atomic_t g_interrupted = 0;
void on_sigint(int) { g_interrupted = 1; }

struct GlobalOptions {
  std::string config_file;
  std::vector<std::string> peers;
  int domain = -1;
  std::string schema_path;
  std::string format = "text";  // text|csv|jsonl
  bool no_multicast = false;
};

int fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return code;
}

int fail(int code, const Error& err) {
  std::cerr << "error: " << err.message << " (" << errc_name(err.code) << ")\n";
  return code;
}

Result<core::ContextConfig> make_config(const GlobalOptions& opts) {
  core::ContextConfig cfg;
  if (!opts.config_file.empty()) {
    auto loaded = core::load_config_file(opts.config_file);
    if (!loaded.ok()) return loaded.error();
    cfg = loaded.value();
  } else {
    cfg = core::default_config();
  }
  if (opts.domain >= 0) cfg.domain_id = static_cast<uint32_t>(opts.domain);
  for (const auto& peer : opts.peers) cfg.static_peers.push_back(peer);
  if (opts.no_multicast) cfg.multicast = false;
  if (!opts.schema_path.empty()) cfg.schema_path = opts.schema_path;
  return cfg;
}

Result<interfaces::SchemaRegistry> make_registry(const core::ContextConfig& cfg) {
  auto reg = interfaces::builtin_schemas();
  if (!cfg.schema_path.empty()) {
    if (auto st = reg.load_directory(cfg.schema_path); !st.ok()) return st.error();
  }
  return reg;
}

/// Joins the graph and waits out two announce periods so snapshots are fresh.
Result<std::shared_ptr<core::Context>> join_graph(const core::ContextConfig& cfg,
                                                  bool settle = true) {
  auto ctx = core::Context::create(cfg);
  if (!ctx.ok()) return ctx;
  if (settle) {
    MonoTime end = ctx.value()->clock().now() + 2 * cfg.announce_period;
    while (ctx.value()->clock().now() < end)
      ctx.value()->spin_once(std::chrono::milliseconds(20));
  }
  return ctx;
}

// Blocking service call helper for the CLI verbs.
Result<interfaces::MessageValue> call_service(core::Context& ctx, core::Node& node,
                                              const std::string& service,
                                              const interfaces::TypeDescriptorPtr& req_type,
                                              const interfaces::TypeDescriptorPtr& resp_type,
                                              const interfaces::MessageValue& request,
                                              Duration timeout) {
  auto client = node.create_client(service, req_type, resp_type);
  if (!client.ok()) return client.error();
  std::optional<Result<interfaces::MessageValue>> outcome;
  auto st = client.value()->async_call(
      request, [&outcome](Result<interfaces::MessageValue> r) { outcome = std::move(r); },
      timeout);
  if (!st.ok()) return st.error();
  core::spin_until(ctx, [&] { return outcome.has_value(); }, timeout + std::chrono::seconds(1));
  if (!outcome) return Error{Errc::timeout, "no response from " + service};
  return std::move(*outcome);
}

uint8_t resp_u8(const interfaces::MessageValue& m, const char* field) {
  const auto* v = m.get(field);
  if (!v) return 0;
  const auto* p = std::get_if<interfaces::Primitive>(&v->data);
  if (!p) return 0;
  const auto* b = std::get_if<uint8_t>(p);
  return b ? *b : 0;
}

std::string resp_str(const interfaces::MessageValue& m, const char* field) {
  const auto* v = m.get(field);
  if (!v) return {};
  const auto* p = std::get_if<interfaces::Primitive>(&v->data);
  if (!p) return {};
  const auto* s = std::get_if<std::string>(p);
  return s ? *s : std::string{};
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_sigint);
  CLI::App app{"mbus: a small typed message bus for robot systems"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_file, "key=value configuration file");
  app.add_option("--peer", global.peers, "static peer ip:port (repeatable)");
  app.add_option("--domain", global.domain, "domain id override");
  app.add_option("--schema-path", global.schema_path, "directory of *.schema files");
  app.add_option("--format", global.format, "output format: text|csv|jsonl");
  app.add_flag("--no-multicast", global.no_multicast, "discovery via static peers only");

  // ---- node ----
  auto* node_cmd = app.add_subcommand("node", "node introspection");
  auto* node_list = node_cmd->add_subcommand("list", "list fully-qualified node names");

  // ---- topic ----
  auto* topic_cmd = app.add_subcommand("topic", "topic tools");
  auto* topic_list = topic_cmd->add_subcommand("list", "list topics with types");
  auto* topic_echo = topic_cmd->add_subcommand("echo", "print messages on a topic");
  std::string echo_topic;
  uint64_t echo_count = 0;
  double echo_timeout = 10.0;
  bool echo_best_effort = false;
  topic_echo->add_option("topic", echo_topic)->required();
  topic_echo->add_option("--count", echo_count, "stop after N messages (0: forever)");
  topic_echo->add_option("--timeout", echo_timeout, "seconds to wait for the topic");
  topic_echo->add_flag("--best-effort", echo_best_effort, "request best-effort delivery");

  auto* topic_pub = topic_cmd->add_subcommand("pub", "publish a message");
  std::string pub_topic, pub_type, pub_data = "{}";
  double pub_rate = 1.0;
  uint64_t pub_count = 1;
  topic_pub->add_option("topic", pub_topic)->required();
  topic_pub->add_option("--type", pub_type, "message type name")->required();
  topic_pub->add_option("--data", pub_data, "message fields as JSON");
  topic_pub->add_option("--rate", pub_rate, "messages per second");
  topic_pub->add_option("--count", pub_count, "number of messages");

  auto* topic_hz = topic_cmd->add_subcommand("hz", "measure publish rate");
  std::string hz_topic;
  double hz_window = 3.0;
  topic_hz->add_option("topic", hz_topic)->required();
  topic_hz->add_option("--window", hz_window, "measurement window seconds");

  // ---- service ----
  auto* service_cmd = app.add_subcommand("service", "service tools");
  auto* service_call = service_cmd->add_subcommand("call", "call a service");
  std::string svc_name, svc_req_type, svc_resp_type, svc_data = "{}";
  double svc_timeout = 5.0;
  service_call->add_option("service", svc_name)->required();
  service_call->add_option("--req-type", svc_req_type)->required();
  service_call->add_option("--resp-type", svc_resp_type)->required();
  service_call->add_option("--data", svc_data, "request fields as JSON");
  service_call->add_option("--timeout", svc_timeout, "seconds");

  // ---- lifecycle ----
  auto* lifecycle_cmd = app.add_subcommand("lifecycle", "managed node control");
  auto* lifecycle_get = lifecycle_cmd->add_subcommand("get", "query a node's state");
  std::string lc_node;
  lifecycle_get->add_option("node", lc_node)->required();
  auto* lifecycle_set = lifecycle_cmd->add_subcommand("set", "trigger a transition");
  std::string lc_set_node, lc_transition;
  lifecycle_set->add_option("node", lc_set_node)->required();
  lifecycle_set->add_option("transition", lc_transition,
                            "CONFIGURE|ACTIVATE|DEACTIVATE|CLEANUP|SHUTDOWN")
      ->required();

  // ---- param ----
  auto* param_cmd = app.add_subcommand("param", "parameter access");
  auto* param_get = param_cmd->add_subcommand("get", "read a parameter");
  std::string pg_node, pg_name;
  param_get->add_option("node", pg_node)->required();
  param_get->add_option("name", pg_name)->required();
  auto* param_set = param_cmd->add_subcommand("set", "write a parameter");
  std::string ps_node, ps_name, ps_value;
  param_set->add_option("node", ps_node)->required();
  param_set->add_option("name", ps_name)->required();
  param_set->add_option("value", ps_value, "JSON literal, e.g. 2.5, true, \"text\"")->required();
  auto* param_list = param_cmd->add_subcommand("list", "list parameters");
  std::string pl_node, pl_prefix;
  param_list->add_option("node", pl_node)->required();
  param_list->add_option("--prefix", pl_prefix);

  // ---- bag ----
  auto* bag_cmd = app.add_subcommand("bag", "record and replay");
  auto* bag_record_cmd = bag_cmd->add_subcommand("record", "record topics to a bag file");
  std::vector<std::string> rec_topics;
  std::string rec_output = "out.mbag";
  uint64_t rec_limit = 0;
  double rec_duration = 0;
  bag_record_cmd->add_option("topics", rec_topics, "topics to record")->required();
  bag_record_cmd->add_option("-o,--output", rec_output);
  bag_record_cmd->add_option("--limit", rec_limit, "stop after N messages");
  bag_record_cmd->add_option("--duration", rec_duration, "stop after S seconds");
  auto* bag_play_cmd = bag_cmd->add_subcommand("play", "replay a bag file");
  std::string play_file;
  double play_rate = 1.0;
  bag_play_cmd->add_option("file", play_file)->required();
  bag_play_cmd->add_option("--rate", play_rate, "timing multiplier");
  auto* bag_info_cmd = bag_cmd->add_subcommand("info", "summarize a bag file");
  std::string info_file;
  bag_info_cmd->add_option("file", info_file)->required();

  // ---- perf ----
  auto* perf_cmd = app.add_subcommand("perf", "message-size benchmark");
  auto* perf_run_cmd = perf_cmd->add_subcommand("run", "run the benchmark");
  std::string perf_mode = "intra";
  std::vector<size_t> perf_sizes;
  double perf_rate = 1000, perf_duration = 3;
  std::string perf_csv_out;
  perf_run_cmd->add_option("--mode", perf_mode, "intra|single|inter");
  perf_run_cmd->add_option("--sizes", perf_sizes, "message sizes in bytes");
  perf_run_cmd->add_option("--rate", perf_rate, "target messages per second");
  perf_run_cmd->add_option("--duration", perf_duration, "seconds per size");
  perf_run_cmd->add_option("--csv", perf_csv_out, "write CSV to this file");

  auto* perf_worker = app.add_subcommand("perf-worker", "internal: perf publisher child");
  perf_worker->group("");  // hidden
  std::string pw_peer;
  size_t pw_size = 1024;
  double pw_rate = 1000, pw_duration = 3;
  perf_worker->add_option("--peer", pw_peer)->required();
  perf_worker->add_option("--size", pw_size)->required();
  perf_worker->add_option("--rate", pw_rate)->required();
  perf_worker->add_option("--duration", pw_duration)->required();

  // ---- loss ----
  auto* loss_cmd = app.add_subcommand("loss", "packet-loss resilience benchmark");
  auto* loss_run_cmd = loss_cmd->add_subcommand("run", "run the loss experiment");
  std::vector<double> loss_percents{0, 10, 20};
  double loss_bw = 54e6, loss_rate = 29, loss_duration = 15, loss_grace = 2;
  size_t loss_size = 1000;
  uint64_t loss_seed = 42;
  std::string loss_csv_out;
  loss_run_cmd->add_option("--losses", loss_percents, "loss percentages");
  loss_run_cmd->add_option("--bandwidth", loss_bw, "link cap in bits/second");
  loss_run_cmd->add_option("--size", loss_size, "payload bytes per message");
  loss_run_cmd->add_option("--rate", loss_rate, "messages per second");
  loss_run_cmd->add_option("--duration", loss_duration, "seconds");
  loss_run_cmd->add_option("--grace", loss_grace, "post-run drain seconds");
  loss_run_cmd->add_option("--seed", loss_seed, "impairment RNG seed");
  loss_run_cmd->add_option("--csv", loss_csv_out, "write CSV to this file");

  auto* loss_worker = app.add_subcommand("loss-worker", "internal: loss publisher child");
  loss_worker->group("");
  std::string lw_peer;
  size_t lw_size = 1000;
  double lw_rate = 29, lw_duration = 15, lw_grace = 2, lw_drop = 0, lw_bw = 54e6;
  uint64_t lw_seed = 43;
  loss_worker->add_option("--peer", lw_peer)->required();
  loss_worker->add_option("--size", lw_size)->required();
  loss_worker->add_option("--rate", lw_rate)->required();
  loss_worker->add_option("--duration", lw_duration)->required();
  loss_worker->add_option("--grace", lw_grace)->required();
  loss_worker->add_option("--drop", lw_drop)->required();
  loss_worker->add_option("--bandwidth", lw_bw)->required();
  loss_worker->add_option("--seed", lw_seed)->required();

  // ---- security ----
  auto* security_cmd = app.add_subcommand("security", "keystore management");
  std::string ks_root;
  security_cmd->add_option("--keystore", ks_root, "keystore directory")->required();
  auto* sec_anchor = security_cmd->add_subcommand("create-anchor", "generate the trust anchor");
  bool anchor_overwrite = false;
  sec_anchor->add_flag("--overwrite", anchor_overwrite);
  auto* sec_identity = security_cmd->add_subcommand("create-identity", "provision a subject");
  std::string id_subject;
  double id_days = 365;
  bool id_overwrite = false;
  sec_identity->add_option("subject", id_subject)->required();
  sec_identity->add_option("--days", id_days, "validity in days");
  sec_identity->add_flag("--overwrite", id_overwrite);
  auto* sec_perms = security_cmd->add_subcommand("create-permissions", "sign allow rules");
  std::string perm_subject;
  std::vector<std::string> perm_rules;
  bool perm_overwrite = false;
  sec_perms->add_option("subject", perm_subject)->required();
  sec_perms->add_option("--rule", perm_rules, "pub:<glob> or sub:<glob> (repeatable)");
  sec_perms->add_flag("--overwrite", perm_overwrite);
  auto* sec_verify = security_cmd->add_subcommand("verify", "verify stored material");
  std::string verify_subject;
  sec_verify->add_option("subject", verify_subject, "subject (default: all)");

  // ---- run (composition) ----
  auto* run_cmd = app.add_subcommand("run", "run bundled components in one process");
  std::vector<std::string> run_components;
  double run_seconds = 0;
  run_cmd->add_option("components", run_components, "talker|listener|adder|countdown")
      ->required();
  run_cmd->add_option("--for", run_seconds, "stop after S seconds (0: until SIGINT)");

  CLI11_PARSE(app, argc, argv);

  auto cfg_or = make_config(global);
  if (!cfg_or.ok()) return fail(kUserError, cfg_or.error());
  core::ContextConfig cfg = cfg_or.value();

  // ------------------------------------------------------------- workers --
  if (perf_worker->parsed())
    return tooling::perf_worker_main(pw_peer, pw_size, pw_rate, pw_duration, 0);
  if (loss_worker->parsed())
    return tooling::loss_worker_main(lw_peer, lw_size, lw_rate, lw_duration, lw_grace, lw_drop,
                                     lw_bw, lw_seed);

  // ------------------------------------------------------------ security --
  if (security_cmd->parsed()) {
    security::Keystore ks(ks_root);
    if (sec_anchor->parsed()) {
      if (auto st = ks.create_anchor(anchor_overwrite); !st.ok())
        return fail(kRuntimeError, st.error());
      std::cout << "anchor created in " << ks_root << "\n";
      return kOk;
    }
    if (sec_identity->parsed()) {
      auto validity = std::chrono::duration_cast<Duration>(
          std::chrono::duration<double, std::ratio<86400>>(id_days));
      if (auto st = ks.create_identity(id_subject, validity, id_overwrite); !st.ok())
        return fail(st.code() == Errc::name_conflict ? kUserError : kRuntimeError, st.error());
      std::cout << "identity '" << id_subject << "' created\n";
      return kOk;
    }
    if (sec_perms->parsed()) {
      std::vector<security::PermissionRule> rules;
      for (const auto& raw : perm_rules) {
        auto colon = raw.find(':');
        if (colon == std::string::npos)
          return fail(kUserError, "rule must be pub:<glob> or sub:<glob>: " + raw);
        std::string dir = raw.substr(0, colon);
        security::PermissionRule rule;
        if (dir == "pub") rule.direction = security::RuleDirection::Pub;
        else if (dir == "sub") rule.direction = security::RuleDirection::Sub;
        else return fail(kUserError, "rule direction must be pub or sub: " + raw);
        rule.pattern = raw.substr(colon + 1);
        if (rule.pattern.empty()) return fail(kUserError, "empty rule pattern: " + raw);
        rules.push_back(std::move(rule));
      }
      if (auto st = ks.create_permissions(perm_subject, std::move(rules), perm_overwrite);
          !st.ok())
        return fail(kRuntimeError, st.error());
      std::cout << "permissions for '" << perm_subject << "' created\n";
      return kOk;
    }
    if (sec_verify->parsed()) {
      auto subjects = verify_subject.empty() ? ks.subjects()
                                             : std::vector<std::string>{verify_subject};
      if (subjects.empty()) return fail(kUserError, "keystore has no identities");
      bool all_ok = true;
      for (const auto& subject : subjects) {
        auto st = ks.verify(subject, wall_now_ns());
        std::cout << subject << ": " << (st.ok() ? "OK" : st.error().message) << "\n";
        all_ok &= st.ok();
      }
      return all_ok ? kOk : kRuntimeError;
    }
    return fail(kUserError, "missing security subcommand");
  }

  auto registry_or = make_registry(cfg);
  if (!registry_or.ok()) return fail(kUserError, registry_or.error());
  auto registry = std::move(registry_or.value());

  // ----------------------------------------------------------------- node --
  if (node_list->parsed()) {
    auto ctx = join_graph(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    for (const auto& name : ctx.value()->graph().node_names()) std::cout << name << "\n";
    return kOk;
  }

  // ---------------------------------------------------------------- topic --
  if (topic_list->parsed()) {
    auto ctx = join_graph(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    for (const auto& topic : ctx.value()->graph().topic_names()) {
      std::string type;
      for (const auto& ep : ctx.value()->graph().endpoints_on_topic(topic))
        if (!ep.type_name.empty()) type = ep.type_name;
      if (global.format == "jsonl") {
        json j{{"topic", topic}, {"type", type}};
        std::cout << j.dump() << "\n";
      } else {
        std::cout << topic << " [" << type << "]\n";
      }
    }
    return kOk;
  }

  if (topic_echo->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto node = ctx.value()->create_node("echo_" + std::to_string(::getpid() % 100000));
    if (!node.ok()) return fail(kRuntimeError, node.error());
    echo_topic = node.value()->resolve(echo_topic);

    // wait for a publisher to learn the type
    const discovery::EndpointInfo* offer = nullptr;
    MonoTime deadline =
        ctx.value()->clock().now() + Duration(static_cast<int64_t>(echo_timeout * 1e9));
    while (!offer && ctx.value()->clock().now() < deadline && !g_interrupted) {
      for (const auto& ep : ctx.value()->graph().endpoints_on_topic(echo_topic))
        if (ep.direction == discovery::EndpointDirection::Publisher) offer = &ep;
      if (!offer) ctx.value()->spin_once(std::chrono::milliseconds(20));
    }
    if (!offer) return fail(kUserError, "unknown topic '" + echo_topic + "'");

    auto type = registry.find(offer->type_name);
    transport::QosProfile qos;
    qos.reliability = echo_best_effort ? transport::Reliability::BestEffort
                                       : offer->qos.reliability;
    qos.history = transport::History::KeepAll;
    uint64_t seen = 0;
    auto sub = node.value()->create_raw_subscription(
        echo_topic, offer->type_name, offer->type_hash, qos,
        [&](BytesView payload, const core::MessageInfo&) {
          ++seen;
          if (type) {
            auto msg = interfaces::deserialize(payload, type);
            if (msg.ok()) {
              std::cout << tooling::message_to_json(msg.value()).dump() << "\n";
              return;
            }
          }
          std::cout << json{{"raw_hex", to_hex(payload)}}.dump() << "\n";
        });
    if (!sub.ok()) return fail(kRuntimeError, sub.error());
    while (!g_interrupted && (echo_count == 0 || seen < echo_count))
      ctx.value()->spin_once(std::chrono::milliseconds(50));
    return kOk;
  }

  if (topic_pub->parsed()) {
    auto type = registry.find(pub_type);
    if (!type) return fail(kUserError, "unknown type '" + pub_type + "'");
    json data = json::parse(pub_data, nullptr, false);
    if (data.is_discarded()) return fail(kUserError, "bad JSON in --data");
    auto msg = tooling::json_to_message(type, data);
    if (!msg.ok()) return fail(kUserError, msg.error());

    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto node = ctx.value()->create_node("pub_" + std::to_string(::getpid() % 100000));
    if (!node.ok()) return fail(kRuntimeError, node.error());
    auto pub = node.value()->create_publisher(pub_topic, type,
                                              transport::QosProfile::reliable_keep_last(16));
    if (!pub.ok()) return fail(kRuntimeError, pub.error());

    core::spin_until(*ctx.value(), [&] { return pub.value()->matched_count() > 0; },
                     std::chrono::seconds(2));
    auto period = Duration(static_cast<int64_t>(1e9 / pub_rate));
    for (uint64_t i = 0; i < pub_count && !g_interrupted; ++i) {
      if (auto st = pub.value()->publish(msg.value()); !st.ok())
        return fail(kRuntimeError, st.error());
      if (i + 1 < pub_count) {
        MonoTime next = ctx.value()->clock().now() + period;
        while (ctx.value()->clock().now() < next)
          ctx.value()->spin_once(std::chrono::milliseconds(5));
      }
    }
    // linger so reliable subscribers finish
    MonoTime drain = ctx.value()->clock().now() + std::chrono::milliseconds(500);
    while (ctx.value()->clock().now() < drain)
      ctx.value()->spin_once(std::chrono::milliseconds(10));
    return kOk;
  }

  if (topic_hz->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto rate = tooling::measure_topic_hz(*ctx.value(), hz_topic,
                                          Duration(static_cast<int64_t>(hz_window * 1e9)));
    if (!rate.ok())
      return fail(rate.error().code == Errc::not_found ? kUserError : kRuntimeError,
                  rate.error());
    std::cout << "average rate: " << rate.value() << " Hz\n";
    return kOk;
  }

  // -------------------------------------------------------------- service --
  if (service_call->parsed()) {
    auto req_type = registry.find(svc_req_type);
    auto resp_type = registry.find(svc_resp_type);
    if (!req_type || !resp_type) return fail(kUserError, "unknown request/response type");
    json data = json::parse(svc_data, nullptr, false);
    if (data.is_discarded()) return fail(kUserError, "bad JSON in --data");
    auto request = tooling::json_to_message(req_type, data);
    if (!request.ok()) return fail(kUserError, request.error());

    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto node = ctx.value()->create_node("svc_call_" + std::to_string(::getpid() % 100000));
    if (!node.ok()) return fail(kRuntimeError, node.error());
    auto response = call_service(*ctx.value(), *node.value(), svc_name, req_type, resp_type,
                                 request.value(),
                                 Duration(static_cast<int64_t>(svc_timeout * 1e9)));
    if (!response.ok()) return fail(kRuntimeError, response.error());
    std::cout << tooling::message_to_json(response.value()).dump() << "\n";
    return kOk;
  }

  // ------------------------------------------------------------ lifecycle --
  if (lifecycle_get->parsed() || lifecycle_set->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto node = ctx.value()->create_node("lc_tool_" + std::to_string(::getpid() % 100000));
    if (!node.ok()) return fail(kRuntimeError, node.error());

    if (lifecycle_get->parsed()) {
      auto response = call_service(
          *ctx.value(), *node.value(), lc_node + "/lifecycle/get_state",
          registry.find("mgmt/GetStateRequest"), registry.find("mgmt/GetStateResponse"),
          interfaces::MessageValue(registry.find("mgmt/GetStateRequest")),
          std::chrono::seconds(5));
      if (!response.ok()) return fail(kRuntimeError, response.error());
      std::cout << mgmt::lifecycle_state_name(
                       static_cast<mgmt::LifecycleState>(resp_u8(response.value(), "state")))
                << "\n";
      return kOk;
    }
    auto transition = mgmt::transition_request_from_name(lc_transition);
    if (!transition) return fail(kUserError, "unknown transition '" + lc_transition + "'");
    interfaces::MessageValue req(registry.find("mgmt/ChangeStateRequest"));
    (void)req.set("transition", interfaces::Value(interfaces::Primitive(
                                    static_cast<uint8_t>(*transition))));
    auto response = call_service(*ctx.value(), *node.value(), lc_set_node +
                                     "/lifecycle/change_state",
                                 registry.find("mgmt/ChangeStateRequest"),
                                 registry.find("mgmt/ChangeStateResponse"), req,
                                 std::chrono::seconds(5));
    if (!response.ok()) return fail(kRuntimeError, response.error());
    if (resp_u8(response.value(), "ok") != 1)
      return fail(kRuntimeError, "transition rejected: " + resp_str(response.value(), "error"));
    std::cout << mgmt::lifecycle_state_name(
                     static_cast<mgmt::LifecycleState>(resp_u8(response.value(), "state")))
              << "\n";
    return kOk;
  }

  // ---------------------------------------------------------------- param --
  if (param_get->parsed() || param_set->parsed() || param_list->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    auto node = ctx.value()->create_node("param_tool_" + std::to_string(::getpid() % 100000));
    if (!node.ok()) return fail(kRuntimeError, node.error());

    if (param_get->parsed()) {
      interfaces::MessageValue req(registry.find("mgmt/ParamGetRequest"));
      (void)req.set("name", interfaces::Value(interfaces::Primitive(pg_name)));
      auto response = call_service(*ctx.value(), *node.value(), pg_node + "/param/get",
                                   registry.find("mgmt/ParamGetRequest"),
                                   registry.find("mgmt/ParamGetResponse"), req,
                                   std::chrono::seconds(5));
      if (!response.ok()) return fail(kRuntimeError, response.error());
      if (resp_u8(response.value(), "ok") != 1)
        return fail(kUserError, resp_str(response.value(), "error"));
      std::string blob = resp_str(response.value(), "value");
      auto value = mgmt::parameter_value_from_bytes(Bytes(blob.begin(), blob.end()));
      if (!value.ok()) return fail(kRuntimeError, value.error());
      std::cout << mgmt::parameter_value_str(value.value()) << "\n";
      return kOk;
    }
    if (param_set->parsed()) {
      json literal = json::parse(ps_value, nullptr, false);
      if (literal.is_discarded()) return fail(kUserError, "value must be a JSON literal");
      mgmt::ParameterValue value;
      if (literal.is_boolean()) value = literal.get<bool>();
      else if (literal.is_number_integer()) value = literal.get<int64_t>();
      else if (literal.is_number_float()) value = literal.get<double>();
      else if (literal.is_string()) value = literal.get<std::string>();
      else return fail(kUserError, "unsupported parameter literal");
      interfaces::MessageValue req(registry.find("mgmt/ParamSetRequest"));
      (void)req.set("name", interfaces::Value(interfaces::Primitive(ps_name)));
      auto blob = mgmt::parameter_value_bytes(value);
      (void)req.set("value", interfaces::Value(interfaces::Primitive(
                                 std::string(blob.begin(), blob.end()))));
      auto response = call_service(*ctx.value(), *node.value(), ps_node + "/param/set",
                                   registry.find("mgmt/ParamSetRequest"),
                                   registry.find("mgmt/ParamSetResponse"), req,
                                   std::chrono::seconds(5));
      if (!response.ok()) return fail(kRuntimeError, response.error());
      if (resp_u8(response.value(), "ok") != 1)
        return fail(kUserError, resp_str(response.value(), "error"));
      std::cout << "ok\n";
      return kOk;
    }
    interfaces::MessageValue req(registry.find("mgmt/ParamListRequest"));
    (void)req.set("prefix", interfaces::Value(interfaces::Primitive(pl_prefix)));
    auto response = call_service(*ctx.value(), *node.value(), pl_node + "/param/list",
                                 registry.find("mgmt/ParamListRequest"),
                                 registry.find("mgmt/ParamListResponse"), req,
                                 std::chrono::seconds(5));
    if (!response.ok()) return fail(kRuntimeError, response.error());
    auto j = tooling::message_to_json(response.value());
    for (const auto& name : j["names"]) std::cout << name.get<std::string>() << "\n";
    return kOk;
  }

  // ------------------------------------------------------------------ bag --
  if (bag_record_cmd->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    tooling::RecordOptions options;
    options.topics = rec_topics;
    options.output = rec_output;
    options.message_limit = rec_limit;
    if (rec_duration > 0) options.duration = Duration(static_cast<int64_t>(rec_duration * 1e9));
    auto stats = tooling::bag_record(*ctx.value(), options);
    if (!stats.ok()) return fail(kRuntimeError, stats.error());
    std::cout << "recorded " << stats.value().messages << " messages to " << rec_output << "\n";
    return kOk;
  }
  if (bag_play_cmd->parsed()) {
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    tooling::PlayOptions options;
    options.rate = play_rate;
    auto stats = tooling::bag_play(*ctx.value(), play_file, options);
    if (!stats.ok())
      return fail(stats.error().code == Errc::bag_format ? kUserError : kRuntimeError,
                  stats.error());
    std::cout << "replayed " << stats.value().messages << " messages in "
              << static_cast<double>(stats.value().wall_elapsed.count()) / 1e9 << " s\n";
    return kOk;
  }
  if (bag_info_cmd->parsed()) {
    auto info = tooling::bag_info(info_file);
    if (!info.ok()) return fail(kUserError, info.error());
    std::cout << "messages: " << info.value().message_count << "\n";
    std::cout << "duration: " << static_cast<double>(info.value().span.count()) / 1e9 << " s\n";
    for (const auto& [topic, count] : info.value().per_topic)
      std::cout << "  " << topic << ": " << count << "\n";
    return kOk;
  }

  // ----------------------------------------------------------------- perf --
  if (perf_run_cmd->parsed()) {
    tooling::PerfConfig pcfg;
    if (perf_mode == "intra") pcfg.mode = tooling::PerfMode::IntraProcess;
    else if (perf_mode == "single") pcfg.mode = tooling::PerfMode::SingleProcess;
    else if (perf_mode == "inter") pcfg.mode = tooling::PerfMode::InterProcess;
    else return fail(kUserError, "--mode must be intra, single or inter");
    if (!perf_sizes.empty()) pcfg.sizes = perf_sizes;
    pcfg.rate_hz = perf_rate;
    pcfg.duration_s = perf_duration;
    char exe[4096];
    ssize_t n = readlink("/proc/self/exe", exe, sizeof exe - 1);
    if (n > 0) pcfg.worker_exe = std::string(exe, static_cast<size_t>(n));
    auto result = tooling::perf_run(pcfg);
    if (!result.ok()) return fail(kRuntimeError, result.error());
    std::string csv = tooling::perf_csv(result.value());
    if (!perf_csv_out.empty()) {
      std::ofstream out(perf_csv_out);
      out << csv;
    }
    std::cout << csv;
    return kOk;
  }

  // ----------------------------------------------------------------- loss --
  if (loss_run_cmd->parsed()) {
    tooling::LossConfig lcfg;
    lcfg.loss_percents = loss_percents;
    lcfg.bandwidth_bps = loss_bw;
    lcfg.message_size = loss_size;
    lcfg.rate_hz = loss_rate;
    lcfg.duration_s = loss_duration;
    lcfg.grace_s = loss_grace;
    lcfg.seed = loss_seed;
    char exe[4096];
    ssize_t n = readlink("/proc/self/exe", exe, sizeof exe - 1);
    if (n > 0) lcfg.worker_exe = std::string(exe, static_cast<size_t>(n));
    auto runs = tooling::loss_run(lcfg);
    if (!runs.ok()) return fail(kRuntimeError, runs.error());
    std::string csv = tooling::loss_csv(runs.value());
    if (!loss_csv_out.empty()) {
      std::ofstream out(loss_csv_out);
      out << csv;
    }
    std::cout << csv;
    for (const auto& run : runs.value())
      std::cerr << "loss " << run.loss_percent << "%: sent " << run.total_sent << ", received "
                << run.total_received << "\n";
    return kOk;
  }

  // ------------------------------------------------------------------ run --
  if (run_cmd->parsed()) {
    core::register_demo_components();
    auto ctx = core::Context::create(cfg);
    if (!ctx.ok()) return fail(kRuntimeError, ctx.error());
    std::vector<std::shared_ptr<core::Node>> nodes;
    for (const auto& name : run_components) {
      auto node = core::ComponentRegistry::instance().instantiate(name, *ctx.value());
      if (!node.ok()) return fail(kUserError, node.error());
      nodes.push_back(node.value());
    }
    core::SingleThreadedExecutor executor;
    executor.add_context(ctx.value());
    MonoTime end = run_seconds > 0
                       ? ctx.value()->clock().now() +
                             Duration(static_cast<int64_t>(run_seconds * 1e9))
                       : MonoTime::max();
    while (!g_interrupted && ctx.value()->clock().now() < end)
      executor.spin_once(std::chrono::milliseconds(50));
    return kOk;
  }

  return fail(kUserError, "missing subcommand");
}
