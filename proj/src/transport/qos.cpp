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

#include "mbus/transport/qos.hpp"

namespace mbus::transport {

namespace {
void encode_opt_duration(ByteWriter& w, const std::optional<Duration>& d) {
  w.u8(d.has_value() ? 1 : 0);
  if (d) w.i64(d->count());
}

Result<std::optional<Duration>> decode_opt_duration(ByteReader& r) {
  if (r.u8() == 0) return std::optional<Duration>{};
  int64_t ns = r.i64();
  if (ns <= 0) return Error{Errc::decode_error, "non-positive duration"};
  return std::optional<Duration>(Duration(ns));
}
}  // namespace

Status validate_qos(const QosProfile& q) {
  if (q.history == History::KeepLast && q.depth < 1)
    return Error{Errc::validation_error, "KEEP_LAST depth must be >= 1"};
  for (const auto& d : {q.deadline, q.lifespan, q.lease_duration})
    if (d && d->count() <= 0)
      return Error{Errc::validation_error, "durations must be > 0 when present"};
  return {};
}

void encode_qos(ByteWriter& w, const QosProfile& q) {
  w.u8(static_cast<uint8_t>(q.reliability));
  w.u8(static_cast<uint8_t>(q.durability));
  w.u8(static_cast<uint8_t>(q.history));
  w.u32(q.depth);
  w.u8(static_cast<uint8_t>(q.liveliness));
  encode_opt_duration(w, q.deadline);
  encode_opt_duration(w, q.lifespan);
  encode_opt_duration(w, q.lease_duration);
}

Result<QosProfile> decode_qos(ByteReader& r) {
  QosProfile q;
  uint8_t rel = r.u8(), dur = r.u8(), hist = r.u8();
  q.depth = r.u32();
  uint8_t live = r.u8();
  if (rel > 1 || dur > 1 || hist > 1 || live > 1)
    return Error{Errc::decode_error, "bad qos enum"};
  q.reliability = static_cast<Reliability>(rel);
  q.durability = static_cast<Durability>(dur);
  q.history = static_cast<History>(hist);
  q.liveliness = static_cast<Liveliness>(live);
  auto deadline = decode_opt_duration(r);
  if (!deadline.ok()) return deadline.error();
  q.deadline = deadline.value();
  auto lifespan = decode_opt_duration(r);
  if (!lifespan.ok()) return lifespan.error();
  q.lifespan = lifespan.value();
  auto lease = decode_opt_duration(r);
  if (!lease.ok()) return lease.error();
  q.lease_duration = lease.value();
  if (!r.ok()) return Error{Errc::decode_error, "truncated qos"};
  if (auto st = validate_qos(q); !st.ok()) return Error{Errc::decode_error, st.error().message};
  return q;
}

std::string qos_summary(const QosProfile& q) {
  std::string s;
  s += q.reliability == Reliability::Reliable ? "reliable" : "best_effort";
  s += q.durability == Durability::TransientLocal ? "/transient_local" : "/volatile";
  if (q.history == History::KeepAll) {
    s += "/keep_all";
  } else {
    s += "/keep_last(" + std::to_string(q.depth) + ")";
  }
  if (q.deadline) s += "/deadline=" + std::to_string(q.deadline->count() / 1000000) + "ms";
  if (q.lifespan) s += "/lifespan=" + std::to_string(q.lifespan->count() / 1000000) + "ms";
  if (q.liveliness == Liveliness::Manual) s += "/manual_liveliness";
  if (q.lease_duration)
    s += "/lease=" + std::to_string(q.lease_duration->count() / 1000000) + "ms";
  return s;
}

}  // namespace mbus::transport
