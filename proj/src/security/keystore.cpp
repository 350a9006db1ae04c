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

#include "mbus/security/keystore.hpp"

#include <filesystem>
#include <fstream>

namespace mbus::security {

namespace fs = std::filesystem;

namespace {
constexpr char kMagic[4] = {'M', 'K', 'E', 'Y'};
constexpr uint16_t kVersion = 1;
}  // namespace

Status write_key_object(const std::string& path, KeyObjectType type, BytesView payload) {
  ByteWriter w(payload.size() + 11);
  w.raw(kMagic, 4);
  w.u16(kVersion);
  w.u8(static_cast<uint8_t>(type));
  w.u32(static_cast<uint32_t>(payload.size()));
  w.raw(payload);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return Error{Errc::io_error, "cannot write " + path};
  out.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) return Error{Errc::io_error, "short write to " + path};
  return {};
}

Result<Bytes> read_key_object(const std::string& path, KeyObjectType expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{Errc::io_error, "cannot read " + path};
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  auto magic = r.raw(4);
  if (!r.ok() || std::memcmp(magic.data(), kMagic, 4) != 0)
    return Error{Errc::decode_error, "bad key container magic in " + path};
  if (r.u16() != kVersion) return Error{Errc::decode_error, "bad key container version"};
  auto type = static_cast<KeyObjectType>(r.u8());
  uint32_t len = r.u32();
  if (!r.ok() || r.remaining() != len)
    return Error{Errc::decode_error, "bad key container length in " + path};
  if (type != expected) return Error{Errc::decode_error, "wrong key object type in " + path};
  auto view = r.raw(len);
  return Bytes(view.begin(), view.end());
}

std::string Keystore::subject_dir(const std::string& subject) const {
  return root_ + "/" + subject;
}

Status Keystore::create_anchor(bool overwrite) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  std::string pub_path = root_ + "/anchor.pub.mkey";
  if (!overwrite && fs::exists(pub_path))
    return Error{Errc::name_conflict, "anchor already exists (use overwrite)"};
  auto kp = ed25519_generate();
  if (!kp.ok()) return kp.error();
  if (auto st = write_key_object(pub_path, KeyObjectType::AnchorPublic, kp.value().public_key);
      !st.ok())
    return st;
  return write_key_object(root_ + "/anchor.key.mkey", KeyObjectType::AnchorPrivate,
                          kp.value().private_key);
}

Result<Bytes> Keystore::anchor_public() const {
  return read_key_object(root_ + "/anchor.pub.mkey", KeyObjectType::AnchorPublic);
}

Result<Bytes> Keystore::anchor_private() const {
  return read_key_object(root_ + "/anchor.key.mkey", KeyObjectType::AnchorPrivate);
}

Status Keystore::create_identity(const std::string& subject, Duration validity, bool overwrite) {
  if (subject.empty() || subject.find('/') != std::string::npos)
    return Error{Errc::validation_error, "subject must be a plain name"};
  auto anchor_key = anchor_private();
  if (!anchor_key.ok()) return anchor_key.error();

  std::string dir = subject_dir(subject);
  std::string cert_path = dir + "/identity.cert.mkey";
  if (!overwrite && fs::exists(cert_path))
    return Error{Errc::name_conflict, "identity '" + subject + "' already exists"};
  std::error_code ec;
  fs::create_directories(dir, ec);

  auto kp = ed25519_generate();
  if (!kp.ok()) return kp.error();

  IdentityCertificate cert;
  cert.subject = subject;
  cert.public_key = kp.value().public_key;
  cert.valid_from_wall_ns = wall_now_ns();
  cert.valid_to_wall_ns = cert.valid_from_wall_ns + static_cast<uint64_t>(validity.count());
  auto sig = ed25519_sign(anchor_key.value(), cert.signing_bytes());
  if (!sig.ok()) return sig.error();
  cert.signature = sig.value();

  if (auto st = write_key_object(cert_path, KeyObjectType::IdentityCert,
                                 encode_certificate(cert));
      !st.ok())
    return st;
  return write_key_object(dir + "/identity.key.mkey", KeyObjectType::IdentityPrivate,
                          kp.value().private_key);
}

Status Keystore::create_permissions(const std::string& subject,
                                    std::vector<PermissionRule> rules, bool overwrite) {
  auto anchor_key = anchor_private();
  if (!anchor_key.ok()) return anchor_key.error();
  std::string dir = subject_dir(subject);
  std::string path = dir + "/permissions.mkey";
  if (!overwrite && fs::exists(path))
    return Error{Errc::name_conflict, "permissions for '" + subject + "' already exist"};
  std::error_code ec;
  fs::create_directories(dir, ec);

  PermissionsDocument doc;
  doc.subject = subject;
  doc.rules = std::move(rules);
  auto sig = ed25519_sign(anchor_key.value(), doc.signing_bytes());
  if (!sig.ok()) return sig.error();
  doc.signature = sig.value();
  return write_key_object(path, KeyObjectType::Permissions, encode_permissions(doc));
}

Result<ParticipantIdentity> Keystore::load(const std::string& subject) const {
  ParticipantIdentity id;
  auto anchor = anchor_public();
  if (!anchor.ok()) return anchor.error();
  id.anchor_public = anchor.value();

  std::string dir = subject_dir(subject);
  auto cert_bytes = read_key_object(dir + "/identity.cert.mkey", KeyObjectType::IdentityCert);
  if (!cert_bytes.ok()) return cert_bytes.error();
  auto cert = decode_certificate(cert_bytes.value());
  if (!cert.ok()) return cert.error();
  id.certificate = std::move(cert.value());

  auto key = read_key_object(dir + "/identity.key.mkey", KeyObjectType::IdentityPrivate);
  if (!key.ok()) return key.error();
  id.private_key = key.value();

  auto perm_bytes = read_key_object(dir + "/permissions.mkey", KeyObjectType::Permissions);
  if (!perm_bytes.ok()) return perm_bytes.error();
  auto perms = decode_permissions(perm_bytes.value());
  if (!perms.ok()) return perms.error();
  id.permissions = std::move(perms.value());
  return id;
}

Status Keystore::verify(const std::string& subject, uint64_t now_wall_ns) const {
  auto id = load(subject);
  if (!id.ok()) return id.error();
  if (auto st = verify_certificate(id.value().certificate, id.value().anchor_public, now_wall_ns);
      !st.ok())
    return st;
  if (auto st = verify_permissions(id.value().permissions, id.value().anchor_public); !st.ok())
    return st;
  if (id.value().permissions.subject != subject)
    return Error{Errc::auth_failure, "permissions subject mismatch"};
  return {};
}

std::vector<std::string> Keystore::subjects() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (fs::directory_iterator it(root_, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_directory() && fs::exists(it->path() / "identity.cert.mkey"))
      out.push_back(it->path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mbus::security
