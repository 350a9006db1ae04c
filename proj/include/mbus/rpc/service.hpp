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

#include "mbus/core/node.hpp"
#include "mbus/core/work.hpp"
#include "mbus/rpc/types.hpp"

namespace mbus::rpc {

/// Services ride on two reliable topics: /svc<name>/request and
/// /svc<name>/response, both RELIABLE/VOLATILE/KEEP_ALL. Requests carry a
/// (client guid, sequence) correlation id; responses echo it, so shuffled
/// arrival can never mis-assign a completion.
namespace detail {

struct ServiceTopicInfo {
  std::string request_topic, response_topic;
  uint64_t request_hash, response_hash;
};
ServiceTopicInfo service_topics(const std::string& resolved_service, uint64_t request_type_hash,
                                uint64_t response_type_hash);

using RawHandler = std::function<Result<Bytes>(BytesView request)>;
using RawResponseCallback = std::function<void(Result<Bytes>)>;

class RawServiceServer {
 public:
  static Result<std::shared_ptr<RawServiceServer>> create(core::Node& node,
                                                          const std::string& service,
                                                          const std::string& type_label,
                                                          uint64_t request_hash,
                                                          uint64_t response_hash,
                                                          RawHandler handler);
  const std::string& service_name() const { return service_; }
  uint64_t requests_served() const { return served_; }

 private:
  RawServiceServer() = default;
  std::string service_;
  std::shared_ptr<core::Publisher> response_pub_;
  std::shared_ptr<core::Subscription> request_sub_;
  RawHandler handler_;
  uint64_t served_ = 0;
  Guid marker_guid_{};
  core::Context* ctx_ = nullptr;
};

class RawServiceClient : public core::Sweepable,
                         public std::enable_shared_from_this<RawServiceClient> {
 public:
  static Result<std::shared_ptr<RawServiceClient>> create(core::Node& node,
                                                          const std::string& service,
                                                          const std::string& type_label,
                                                          uint64_t request_hash,
                                                          uint64_t response_hash);

  /// Queues until the server is matched, publishes over the reliable channel,
  /// completes via the executor with the correlated response or a timeout.
  Status async_call(Bytes request, RawResponseCallback callback,
                    std::optional<Duration> timeout = std::nullopt);
  bool service_ready() const;
  const std::string& service_name() const { return service_; }
  size_t pending_count() const { return pending_.size() + waiting_.size(); }

  std::optional<MonoTime> sweep(MonoTime now) override;

 private:
  RawServiceClient() = default;
  void on_response(BytesView payload);
  void complete(uint64_t corr, Result<Bytes> result);

  struct Pending {
    RawResponseCallback callback;
    MonoTime deadline;
  };
  struct Waiting {
    uint64_t corr;
    Bytes request;
    MonoTime deadline;
  };

  std::string service_;
  core::Context* ctx_ = nullptr;
  std::shared_ptr<core::Publisher> request_pub_;
  std::shared_ptr<core::Subscription> response_sub_;
  uint64_t next_corr_ = 1;
  std::map<uint64_t, Pending> pending_;    // published, awaiting response
  std::vector<Waiting> waiting_;           // held until the server matches
  Guid marker_guid_{};
};

}  // namespace detail

/// Typed request/response server: the handler's error result travels back to
/// the caller as an error response.
class ServiceServer {
 public:
  const std::string& service_name() const { return raw_->service_name(); }
  uint64_t requests_served() const { return raw_->requests_served(); }

 private:
  friend class core::Node;
  std::shared_ptr<detail::RawServiceServer> raw_;
};

class ServiceClient {
 public:
  /// Never blocks on the network; the callback fires on the executor with
  /// the correlated response, an error response, or a timeout.
  Status async_call(const interfaces::MessageValue& request, ResponseCallback callback,
                    std::optional<Duration> timeout = std::nullopt);
  bool service_ready() const { return raw_->service_ready(); }
  const std::string& service_name() const { return raw_->service_name(); }
  size_t pending_count() const { return raw_->pending_count(); }

 private:
  friend class core::Node;
  std::shared_ptr<detail::RawServiceClient> raw_;
  interfaces::TypeDescriptorPtr response_type_;
};

}  // namespace mbus::rpc
