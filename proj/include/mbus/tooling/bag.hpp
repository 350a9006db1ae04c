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

#include <fstream>
#include <map>

#include "mbus/core/context.hpp"

namespace mbus::tooling {

/// Bag file, bit-exact:
///   magic "MBAG", uint16 version = 1, then records:
///   uint64 recv_mono_ns, uint64 recv_wall_ns, uint16 topic_len + topic,
///   uint64 type_hash, uint32 payload_len + payload.
/// Payloads are stored serialized, so unknown types record fine.
struct BagRecord {
  uint64_t recv_mono_ns = 0;
  uint64_t recv_wall_ns = 0;
  std::string topic;
  uint64_t type_hash = 0;
  Bytes payload;
};

class BagWriter {
 public:
  static Result<std::unique_ptr<BagWriter>> open(const std::string& path);
  Status append(const BagRecord& record);  // timestamps must not decrease
  size_t records_written() const { return written_; }

 private:
  BagWriter() = default;
  std::ofstream out_;
  uint64_t last_mono_ = 0;
  size_t written_ = 0;
};

class BagReader {
 public:
  static Result<std::unique_ptr<BagReader>> open(const std::string& path);
  /// nullopt at clean end of file; bag-format errors carry the byte offset.
  Result<std::optional<BagRecord>> next();

 private:
  BagReader() = default;
  Bytes data_;
  size_t pos_ = 0;
  std::string path_;
};

struct BagInfo {
  uint64_t message_count = 0;
  std::map<std::string, uint64_t> per_topic;
  Duration span{0};  // first to last receive timestamp
  size_t file_bytes = 0;
};
Result<BagInfo> bag_info(const std::string& path);

struct RecordOptions {
  std::vector<std::string> topics;   // required; recorded with discovered types
  std::string output;
  uint64_t message_limit = 0;        // 0: no limit
  Duration duration{0};              // zero: until limit
  Duration discovery_timeout = std::chrono::seconds(5);
};
struct RecordStats {
  uint64_t messages = 0;
};
/// Subscribes with the reliability each discovered publisher offers (so both
/// best-effort and reliable sources record), volatile, KEEP_ALL.
Result<RecordStats> bag_record(core::Context& ctx, const RecordOptions& options);

struct PlayOptions {
  double rate = 1.0;  // timing multiplier; deltas are divided by it
  Duration subscriber_wait = std::chrono::seconds(3);
  Duration drain = std::chrono::seconds(1);
};
struct PlayStats {
  uint64_t messages = 0;
  Duration wall_elapsed{0};
};
Result<PlayStats> bag_play(core::Context& ctx, const std::string& path,
                           const PlayOptions& options);

}  // namespace mbus::tooling
