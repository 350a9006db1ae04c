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

#include "mbus/security/identity.hpp"

namespace mbus::security {

Bytes IdentityCertificate::signing_bytes() const {
  ByteWriter w(64);
  w.str(subject);
  w.blob(public_key);
  w.u64(valid_from_wall_ns);
  w.u64(valid_to_wall_ns);
  return w.take();
}

Bytes encode_certificate(const IdentityCertificate& cert) {
  ByteWriter w(128);
  w.raw(cert.signing_bytes());
  w.blob(cert.signature);
  return w.take();
}

Result<IdentityCertificate> decode_certificate(BytesView bytes) {
  ByteReader r(bytes);
  IdentityCertificate cert;
  cert.subject = r.str();
  cert.public_key = r.blob();
  cert.valid_from_wall_ns = r.u64();
  cert.valid_to_wall_ns = r.u64();
  cert.signature = r.blob();
  if (!r.ok() || !r.exhausted()) return Error{Errc::decode_error, "malformed certificate"};
  if (cert.public_key.size() != kKeyBytes || cert.signature.size() != kSigBytes)
    return Error{Errc::decode_error, "bad certificate key or signature size"};
  return cert;
}

Status verify_certificate(const IdentityCertificate& cert, BytesView anchor_public,
                          uint64_t now_wall_ns) {
  if (cert.subject.empty()) return Error{Errc::auth_failure, "empty subject"};
  if (!ed25519_verify(anchor_public, cert.signing_bytes(), cert.signature))
    return Error{Errc::auth_failure, "certificate signature does not verify"};
  if (now_wall_ns < cert.valid_from_wall_ns || now_wall_ns > cert.valid_to_wall_ns)
    return Error{Errc::auth_failure, "certificate outside validity window"};
  return {};
}

Bytes PermissionsDocument::signing_bytes() const {
  ByteWriter w(64);
  w.str(subject);
  w.u32(static_cast<uint32_t>(rules.size()));
  for (const auto& rule : rules) {
    w.u8(static_cast<uint8_t>(rule.direction));
    w.str(rule.pattern);
  }
  return w.take();
}

Bytes encode_permissions(const PermissionsDocument& doc) {
  ByteWriter w(128);
  w.raw(doc.signing_bytes());
  w.blob(doc.signature);
  return w.take();
}

Result<PermissionsDocument> decode_permissions(BytesView bytes) {
  ByteReader r(bytes);
  PermissionsDocument doc;
  doc.subject = r.str();
  uint32_t n = r.u32();
  if (!r.ok() || n > 100'000) return Error{Errc::decode_error, "bad rule count"};
  doc.rules.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    PermissionRule rule;
    uint8_t dir = r.u8();
    if (dir > 1) return Error{Errc::decode_error, "bad rule direction"};
    rule.direction = static_cast<RuleDirection>(dir);
    rule.pattern = r.str();
    if (rule.pattern.empty()) return Error{Errc::decode_error, "empty rule pattern"};
    doc.rules.push_back(std::move(rule));
  }
  doc.signature = r.blob();
  if (!r.ok() || !r.exhausted()) return Error{Errc::decode_error, "malformed permissions"};
  if (doc.signature.size() != kSigBytes)
    return Error{Errc::decode_error, "bad permissions signature size"};
  return doc;
}

Status verify_permissions(const PermissionsDocument& doc, BytesView anchor_public) {
  for (const auto& rule : doc.rules)
    if (rule.pattern.empty()) return Error{Errc::auth_failure, "empty rule pattern"};
  if (!ed25519_verify(anchor_public, doc.signing_bytes(), doc.signature))
    return Error{Errc::auth_failure, "permissions signature does not verify"};
  return {};
}

bool glob_match(std::string_view pattern, std::string_view text) {
  // Iterative glob with star backtracking.
  size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool authorize(const PermissionsDocument& doc, RuleDirection direction, std::string_view topic) {
  for (const auto& rule : doc.rules)
    if (rule.direction == direction && glob_match(rule.pattern, topic)) return true;
  return false;  // deny by default
}

}  // namespace mbus::security
