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

#include "mbus/security/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/rand.h>

#include <memory>

namespace mbus::security {

namespace {

using PkeyPtr = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

Error ssl_error(const char* what) { return Error{Errc::auth_failure, what}; }

Result<KeyPair> generate_raw_keypair(int type) {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(type, nullptr), EVP_PKEY_CTX_free);
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0) return ssl_error("keygen init failed");
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &raw) <= 0) return ssl_error("keygen failed");
  PkeyPtr key(raw, EVP_PKEY_free);
  KeyPair kp;
  kp.public_key.resize(kKeyBytes);
  kp.private_key.resize(kKeyBytes);
  size_t len = kKeyBytes;
  if (EVP_PKEY_get_raw_public_key(key.get(), kp.public_key.data(), &len) <= 0 ||
      len != kKeyBytes)
    return ssl_error("raw public export failed");
  len = kKeyBytes;
  if (EVP_PKEY_get_raw_private_key(key.get(), kp.private_key.data(), &len) <= 0 ||
      len != kKeyBytes)
    return ssl_error("raw private export failed");
  return kp;
}

}  // namespace

Result<KeyPair> ed25519_generate() { return generate_raw_keypair(EVP_PKEY_ED25519); }
Result<KeyPair> x25519_generate() { return generate_raw_keypair(EVP_PKEY_X25519); }

Result<Bytes> ed25519_sign(BytesView private_key, BytesView message) {
  if (private_key.size() != kKeyBytes) return ssl_error("bad private key size");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(),
                                           private_key.size()),
              EVP_PKEY_free);
  if (!key) return ssl_error("bad private key");
  MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) <= 0)
    return ssl_error("sign init failed");
  Bytes sig(kSigBytes);
  size_t siglen = sig.size();
  if (EVP_DigestSign(ctx.get(), sig.data(), &siglen, message.data(), message.size()) <= 0 ||
      siglen != kSigBytes)
    return ssl_error("sign failed");
  return sig;
}

bool ed25519_verify(BytesView public_key, BytesView message, BytesView signature) {
  if (public_key.size() != kKeyBytes || signature.size() != kSigBytes) return false;
  PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                          public_key.size()),
              EVP_PKEY_free);
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) <= 0)
    return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

Result<Bytes> x25519_shared(BytesView private_key, BytesView peer_public) {
  if (private_key.size() != kKeyBytes || peer_public.size() != kKeyBytes)
    return ssl_error("bad x25519 key size");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, private_key.data(),
                                           private_key.size()),
              EVP_PKEY_free);
  PkeyPtr peer(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer_public.data(),
                                           peer_public.size()),
               EVP_PKEY_free);
  if (!key || !peer) return ssl_error("bad x25519 key");
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(key.get(), nullptr), EVP_PKEY_CTX_free);
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
      EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) <= 0)
    return ssl_error("derive init failed");
  Bytes shared(kKeyBytes);
  size_t len = shared.size();
  if (EVP_PKEY_derive(ctx.get(), shared.data(), &len) <= 0 || len != kKeyBytes)
    return ssl_error("derive failed");
  return shared;
}

Result<Bytes> hkdf_sha256(BytesView ikm, BytesView salt, BytesView info, size_t out_len) {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr), EVP_PKEY_CTX_free);
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()) <= 0 ||
      EVP_PKEY_CTX_set1_hkdf_salt(ctx.get(), salt.data(), static_cast<int>(salt.size())) <= 0 ||
      EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), ikm.data(), static_cast<int>(ikm.size())) <= 0 ||
      EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), info.data(), static_cast<int>(info.size())) <= 0)
    return ssl_error("hkdf init failed");
  Bytes out(out_len);
  size_t len = out_len;
  if (EVP_PKEY_derive(ctx.get(), out.data(), &len) <= 0 || len != out_len)
    return ssl_error("hkdf failed");
  return out;
}

Bytes sha256(BytesView data) {
  Bytes out(32);
  unsigned int len = 32;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

Bytes random_bytes(size_t n) {
  Bytes out(n);
  RAND_bytes(out.data(), static_cast<int>(n));
  return out;
}

Result<Bytes> aes256gcm_seal(BytesView key, BytesView nonce, BytesView aad,
                             BytesView plaintext) {
  if (key.size() != kKeyBytes || nonce.size() != kNonceBytes)
    return ssl_error("bad key or nonce size");
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) <= 0 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) <= 0 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) <= 0)
    return ssl_error("gcm init failed");
  int outl = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) <= 0)
    return ssl_error("gcm aad failed");
  Bytes out(plaintext.size() + kTagBytes);
  int ct_len = 0;
  if (!plaintext.empty()) {
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &outl, plaintext.data(),
                          static_cast<int>(plaintext.size())) <= 0)
      return ssl_error("gcm encrypt failed");
    ct_len = outl;
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + ct_len, &outl) <= 0)
    return ssl_error("gcm final failed");
  ct_len += outl;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                          out.data() + ct_len) <= 0)
    return ssl_error("gcm tag failed");
  out.resize(static_cast<size_t>(ct_len) + kTagBytes);
  return out;
}

Result<Bytes> aes256gcm_open(BytesView key, BytesView nonce, BytesView aad, BytesView sealed) {
  if (key.size() != kKeyBytes || nonce.size() != kNonceBytes)
    return ssl_error("bad key or nonce size");
  if (sealed.size() < kTagBytes) return Error{Errc::auth_failure, "sealed payload too short"};
  size_t ct_size = sealed.size() - kTagBytes;
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) <= 0 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) <= 0 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) <= 0)
    return ssl_error("gcm init failed");
  int outl = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &outl, aad.data(), static_cast<int>(aad.size())) <= 0)
    return ssl_error("gcm aad failed");
  Bytes out(ct_size);
  int pt_len = 0;
  if (ct_size > 0) {
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &outl, sealed.data(),
                          static_cast<int>(ct_size)) <= 0)
      return ssl_error("gcm decrypt failed");
    pt_len = outl;
  }
  Bytes tag(sealed.begin() + static_cast<long>(ct_size), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) <= 0)
    return ssl_error("gcm set tag failed");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + pt_len, &outl) <= 0)
    return Error{Errc::auth_failure, "authentication tag mismatch"};
  out.resize(static_cast<size_t>(pt_len) + outl);
  return out;
}

}  // namespace mbus::security
