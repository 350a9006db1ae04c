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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbus/bytes.hpp"
#include "mbus/result.hpp"

namespace mbus::interfaces {

/// Closed set of wire primitives. Every kind has a fixed width except string,
/// which is uint32-length-prefixed.
enum class PrimitiveKind : uint8_t {
  Bool = 0,
  Int8,
  UInt8,
  Int16,
  UInt16,
  Int32,
  UInt32,
  Int64,
  UInt64,
  Float32,
  Float64,
  String,
};

const char* primitive_name(PrimitiveKind k);
std::optional<PrimitiveKind> primitive_from_name(std::string_view name);
size_t primitive_wire_width(PrimitiveKind k);  // 0 for string

class TypeDescriptor;
using TypeDescriptorPtr = std::shared_ptr<const TypeDescriptor>;

/// Array of primitives. `bounded` arrays carry 0..length elements; fixed
/// arrays carry exactly `length`.
struct ArraySpec {
  PrimitiveKind element = PrimitiveKind::UInt8;
  uint32_t length = 0;
  bool bounded = false;

  bool operator==(const ArraySpec&) const = default;
};

using FieldType = std::variant<PrimitiveKind, ArraySpec, TypeDescriptorPtr>;

struct FieldDescriptor {
  std::string name;
  FieldType type;
};

/// Immutable message schema. Built once via make(); nested descriptors are
/// complete before they can be referenced, so self-containment cannot occur.
class TypeDescriptor {
 public:
  static constexpr size_t kMaxNestingDepth = 16;

  static Result<TypeDescriptorPtr> make(std::string name, std::vector<FieldDescriptor> fields);

  const std::string& name() const { return name_; }
  const std::vector<FieldDescriptor>& fields() const { return fields_; }
  const FieldDescriptor* field(std::string_view name) const;
  int field_index(std::string_view name) const;  // -1 when absent

  /// FNV-1a 64 over the canonical byte encoding; see canonical_bytes().
  uint64_t hash() const { return hash_; }

  /// Canonical form hashed by compute_type_hash:
  ///   name bytes, 0x00,
  ///   then per field in declaration order: field name bytes, 0x00, and
  ///     primitive: 0x01, kind byte
  ///     array:     0x02, element kind byte, bounded flag byte, uint32 LE length
  ///     nested:    0x03, canonical form of the nested descriptor, 0x04
  /// Names may not contain NUL, which keeps the form prefix-free.
  Bytes canonical_bytes() const;

  bool structurally_equal(const TypeDescriptor& other) const;

 private:
  TypeDescriptor(std::string name, std::vector<FieldDescriptor> fields);

  std::string name_;
  std::vector<FieldDescriptor> fields_;
  uint64_t hash_ = 0;
};

/// FNV-1a 64 (offset 0xcbf29ce484222325, prime 0x100000001b3).
uint64_t fnv1a64(BytesView data);

/// Hash gating endpoint matching. Deterministic across runs and platforms.
Result<uint64_t> compute_type_hash(const TypeDescriptor& descriptor);

/// Topic routing id: FNV-1a 64 over topic name bytes, 0x00, 8 LE bytes of the
/// type hash.
uint64_t compute_topic_id(std::string_view topic, uint64_t type_hash);

}  // namespace mbus::interfaces
