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

#include "mbus/tooling/bag.hpp"

#include <thread>

namespace mbus::tooling {

namespace {
constexpr char kMagic[4] = {'M', 'B', 'A', 'G'};
constexpr uint16_t kVersion = 1;

Error format_error(const std::string& path, size_t offset, const std::string& what) {
  return Error{Errc::bag_format,
               path + ": " + what + " at byte offset " + std::to_string(offset)};
}
}  // namespace

Result<std::unique_ptr<BagWriter>> BagWriter::open(const std::string& path) {
  auto writer = std::unique_ptr<BagWriter>(new BagWriter());
  writer->out_.open(path, std::ios::binary | std::ios::trunc);
  if (!writer->out_) return Error{Errc::io_error, "cannot open " + path + " for writing"};
  ByteWriter header(6);
  header.raw(kMagic, 4);
  header.u16(kVersion);
  writer->out_.write(reinterpret_cast<const char*>(header.data().data()),
                     static_cast<std::streamsize>(header.size()));
  return writer;
}

Status BagWriter::append(const BagRecord& record) {
  if (record.recv_mono_ns < last_mono_)
    return Error{Errc::validation_error, "bag timestamps must not decrease"};
  last_mono_ = record.recv_mono_ns;
  ByteWriter w(record.payload.size() + record.topic.size() + 32);
  w.u64(record.recv_mono_ns);
  w.u64(record.recv_wall_ns);
  w.u16(static_cast<uint16_t>(record.topic.size()));
  w.raw(record.topic.data(), record.topic.size());
  w.u64(record.type_hash);
  w.u32(static_cast<uint32_t>(record.payload.size()));
  w.raw(record.payload);
  out_.write(reinterpret_cast<const char*>(w.data().data()),
             static_cast<std::streamsize>(w.size()));
  if (!out_) return Error{Errc::io_error, "short write to bag"};
  ++written_;
  return {};
}

Result<std::unique_ptr<BagReader>> BagReader::open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::io_error, "cannot open " + path};
  auto reader = std::unique_ptr<BagReader>(new BagReader());
  reader->path_ = path;
  reader->data_.assign((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  if (reader->data_.size() < 6 || std::memcmp(reader->data_.data(), kMagic, 4) != 0)
    return format_error(path, 0, "bad magic");
  uint16_t version = static_cast<uint16_t>(reader->data_[4] | (reader->data_[5] << 8));
  if (version != kVersion) return format_error(path, 4, "unsupported version");
  reader->pos_ = 6;
  return reader;
}

Result<std::optional<BagRecord>> BagReader::next() {
  if (pos_ == data_.size()) return std::optional<BagRecord>{};
  size_t record_start = pos_;
  ByteReader r(BytesView(data_).subspan(pos_));
  BagRecord rec;
  rec.recv_mono_ns = r.u64();
  rec.recv_wall_ns = r.u64();
  uint16_t topic_len = r.u16();
  auto topic = r.raw(topic_len);
  rec.type_hash = r.u64();
  uint32_t payload_len = r.u32();
  if (!r.ok() || r.remaining() < payload_len)
    return format_error(path_, record_start, "truncated record");
  rec.topic.assign(topic.begin(), topic.end());
  auto payload = r.raw(payload_len);
  rec.payload.assign(payload.begin(), payload.end());
  pos_ += r.position();
  return std::optional<BagRecord>(std::move(rec));
}

Result<BagInfo> bag_info(const std::string& path) {
  auto reader = BagReader::open(path);
  if (!reader.ok()) return reader.error();
  BagInfo info;
  uint64_t first_mono = 0, last_mono = 0;
  for (;;) {
    auto rec = reader.value()->next();
    if (!rec.ok()) return rec.error();
    if (!rec.value()) break;
    if (info.message_count == 0) first_mono = rec.value()->recv_mono_ns;
    last_mono = rec.value()->recv_mono_ns;
    ++info.message_count;
    ++info.per_topic[rec.value()->topic];
    info.file_bytes += rec.value()->payload.size();
  }
  if (info.message_count > 1) info.span = Duration(static_cast<int64_t>(last_mono - first_mono));
  return info;
}

Result<RecordStats> bag_record(core::Context& ctx, const RecordOptions& options) {
  if (options.topics.empty()) return Error{Errc::validation_error, "no topics to record"};
  if (options.output.empty()) return Error{Errc::validation_error, "no output file"};
  auto writer = BagWriter::open(options.output);
  if (!writer.ok()) return writer.error();

  auto node = ctx.create_node("bag_recorder_" + std::to_string(::getpid() % 100000));
  if (!node.ok()) return node.error();

  struct Sink {
    BagWriter* writer;
    uint64_t count = 0;
    std::map<std::string, std::shared_ptr<core::Subscription>> subs;
  };
  auto sink = std::make_shared<Sink>();
  sink->writer = writer.value().get();

  // Discover each topic's offered type and reliability, then subscribe
  // compatibly (request the offered reliability, volatile, keep-all).
  MonoTime discovery_deadline = ctx.clock().now() + options.discovery_timeout;
  std::vector<std::string> todo;
  for (const auto& t : options.topics) todo.push_back(node.value()->resolve(t));
  while (!todo.empty()) {
    if (ctx.clock().now() > discovery_deadline)
      return Error{Errc::timeout, "no publisher appeared on topic '" + todo.front() + "'"};
    ctx.spin_once(std::chrono::milliseconds(20));
    for (auto it = todo.begin(); it != todo.end();) {
      const discovery::EndpointInfo* offer = nullptr;
      for (const auto& ep : ctx.graph().endpoints_on_topic(*it))
        if (ep.direction == discovery::EndpointDirection::Publisher) offer = &ep;
      if (!offer) {
        ++it;
        continue;
      }
      transport::QosProfile qos;
      qos.reliability = offer->qos.reliability;
      qos.history = transport::History::KeepAll;
      std::string topic = *it;
      auto sub = node.value()->create_raw_subscription(
          topic, offer->type_name, offer->type_hash, qos,
          [sink, topic, hash = offer->type_hash, &ctx](BytesView payload,
                                                       const core::MessageInfo&) {
            BagRecord rec;
            rec.recv_mono_ns = static_cast<uint64_t>(to_ns(ctx.clock().now()));
            rec.recv_wall_ns = wall_now_ns();
            rec.topic = topic;
            rec.type_hash = hash;
            rec.payload.assign(payload.begin(), payload.end());
            if (sink->writer->append(rec).ok()) ++sink->count;
          });
      if (!sub.ok()) return sub.error();
      sink->subs[topic] = sub.value();
      it = todo.erase(it);
    }
  }

  MonoTime hard_stop = options.duration > Duration::zero()
                           ? ctx.clock().now() + options.duration
                           : MonoTime::max();
  while (ctx.clock().now() < hard_stop) {
    if (options.message_limit > 0 && sink->count >= options.message_limit) break;
    ctx.spin_once(std::chrono::milliseconds(20));
  }
  node.value()->destroy();
  RecordStats stats;
  stats.messages = sink->count;
  return stats;
}

Result<PlayStats> bag_play(core::Context& ctx, const std::string& path,
                           const PlayOptions& options) {
  if (options.rate <= 0) return Error{Errc::validation_error, "rate must be positive"};
  auto reader = BagReader::open(path);
  if (!reader.ok()) return reader.error();

  // Load everything first: replay timing should not include file I/O.
  std::vector<BagRecord> records;
  for (;;) {
    auto rec = reader.value()->next();
    if (!rec.ok()) return rec.error();
    if (!rec.value()) break;
    records.push_back(std::move(*rec.value()));
  }
  PlayStats stats;
  if (records.empty()) return stats;

  auto node = ctx.create_node("bag_player_" + std::to_string(::getpid() % 100000));
  if (!node.ok()) return node.error();

  std::map<std::pair<std::string, uint64_t>, std::shared_ptr<core::Publisher>> pubs;
  for (const auto& rec : records) {
    auto key = std::make_pair(rec.topic, rec.type_hash);
    if (pubs.count(key)) continue;
    auto pub = node.value()->create_raw_publisher(rec.topic, "", rec.type_hash,
                                                  transport::QosProfile::reliable_keep_all());
    if (!pub.ok()) return pub.error();
    pubs[key] = pub.value();
  }

  // Give subscribers a moment to match before the clock starts.
  MonoTime wait_end = ctx.clock().now() + options.subscriber_wait;
  while (ctx.clock().now() < wait_end) {
    bool all_matched = true;
    for (const auto& [key, pub] : pubs) all_matched &= pub->matched_count() > 0;
    if (all_matched) break;
    ctx.spin_once(std::chrono::milliseconds(20));
  }

  MonoTime start = ctx.clock().now();
  uint64_t base_mono = records.front().recv_mono_ns;
  for (const auto& rec : records) {
    auto offset = Duration(static_cast<int64_t>(
        static_cast<double>(rec.recv_mono_ns - base_mono) / options.rate));
    MonoTime due = start + offset;
    while (ctx.clock().now() < due) {
      Duration left = due - ctx.clock().now();
      ctx.spin_once(std::min(left, Duration(std::chrono::milliseconds(5))));
    }
    auto pub = pubs[{rec.topic, rec.type_hash}];
    if (pub->publish_serialized(rec.payload).ok()) ++stats.messages;
  }
  MonoTime drain_end = ctx.clock().now() + options.drain;
  while (ctx.clock().now() < drain_end) {
    bool acked = true;
    for (const auto& [key, pub] : pubs) acked &= pub->fully_acked();
    if (acked) break;
    ctx.spin_once(std::chrono::milliseconds(10));
  }
  stats.wall_elapsed = ctx.clock().now() - start;
  node.value()->destroy();
  return stats;
}

}  // namespace mbus::tooling
