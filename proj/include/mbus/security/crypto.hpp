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

#include "mbus/bytes.hpp"
#include "mbus/result.hpp"

namespace mbus::security {

// Primitive sizes (raw encodings).
inline constexpr size_t kKeyBytes = 32;    // Ed25519/X25519 keys, AES-256 key
inline constexpr size_t kSigBytes = 64;    // Ed25519 signature
inline constexpr size_t kNonceBytes = 12;  // AES-GCM nonce
inline constexpr size_t kTagBytes = 16;    // AES-GCM tag

struct KeyPair {
  Bytes public_key;
  Bytes private_key;
};

// Identity signatures: Ed25519.
Result<KeyPair> ed25519_generate();
Result<Bytes> ed25519_sign(BytesView private_key, BytesView message);
bool ed25519_verify(BytesView public_key, BytesView message, BytesView signature);

// Ephemeral agreement: X25519.
Result<KeyPair> x25519_generate();
Result<Bytes> x25519_shared(BytesView private_key, BytesView peer_public);

// HKDF-SHA256 key derivation.
Result<Bytes> hkdf_sha256(BytesView ikm, BytesView salt, BytesView info, size_t out_len);

Bytes sha256(BytesView data);
Bytes random_bytes(size_t n);

// AES-256-GCM. seal returns ciphertext || 16-byte tag; open verifies and
// strips it, failing on any bit flip in aad or ciphertext.
Result<Bytes> aes256gcm_seal(BytesView key, BytesView nonce, BytesView aad, BytesView plaintext);
Result<Bytes> aes256gcm_open(BytesView key, BytesView nonce, BytesView aad, BytesView sealed);

}  // namespace mbus::security
