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

#include <atomic>
#include <chrono>
#include <random>

#include "mbus/bytes.hpp"
#include "mbus/guid.hpp"
#include "mbus/result.hpp"

namespace mbus {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "ok";
    case Errc::schema_error: return "schema_error";
    case Errc::decode_error: return "decode_error";
    case Errc::foreign_packet: return "foreign_packet";
    case Errc::resource_exhausted: return "resource_exhausted";
    case Errc::name_conflict: return "name_conflict";
    case Errc::validation_error: return "validation_error";
    case Errc::timeout: return "timeout";
    case Errc::transition_invalid: return "transition_invalid";
    case Errc::unknown_parameter: return "unknown_parameter";
    case Errc::parameter_type: return "parameter_type";
    case Errc::read_only: return "read_only";
    case Errc::access_denied: return "access_denied";
    case Errc::auth_failure: return "auth_failure";
    case Errc::rekey_required: return "rekey_required";
    case Errc::not_found: return "not_found";
    case Errc::io_error: return "io_error";
    case Errc::bag_format: return "bag_format";
    case Errc::partial_result: return "partial_result";
    case Errc::unavailable: return "unavailable";
  }
  return "unknown";
}

static constexpr char kHexDigits[] = "0123456789abcdef";

std::string to_hex(BytesView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes from_hex(std::string_view hex) {
  Bytes out;
  out.reserve(hex.size() / 2);
  int hi = -1;
  for (char c : hex) {
    if (c == ' ' || c == '\n' || c == '\t') continue;
    int nib = hex_nibble(c);
    if (nib < 0) return {};
    if (hi < 0) {
      hi = nib;
    } else {
      out.push_back(static_cast<uint8_t>(hi << 4 | nib));
      hi = -1;
    }
  }
  return out;
}

std::string Guid::short_str() const {
  std::string s;
  for (size_t i = 0; i < 4; ++i) {
    s.push_back(kHexDigits[bytes[i] >> 4]);
    s.push_back(kHexDigits[bytes[i] & 0xf]);
  }
  return s;
}

std::string Guid::str() const { return to_hex(BytesView(bytes.data(), bytes.size())); }

Guid make_participant_guid() {
  static std::atomic<uint64_t> counter{0};
  std::random_device rd;
  uint64_t a = (uint64_t{rd()} << 32) ^ rd();
  uint64_t b = (uint64_t{rd()} << 32) ^ rd();
  b ^= std::chrono::steady_clock::now().time_since_epoch().count();
  b ^= counter.fetch_add(0x9e3779b97f4a7c15ULL);
  Guid g;
  std::memcpy(g.bytes.data(), &a, 8);
  std::memcpy(g.bytes.data() + 8, &b, 4);  // bytes 12..15 stay 0: entity id
  return g;
}

}  // namespace mbus
