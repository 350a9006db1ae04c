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
#include <string>
#include <variant>
#include <vector>

#include "mbus/interfaces/type_descriptor.hpp"

namespace mbus::interfaces {

using Primitive = std::variant<bool, int8_t, uint8_t, int16_t, uint16_t, int32_t, uint32_t,
                               int64_t, uint64_t, float, double, std::string>;

PrimitiveKind primitive_kind_of(const Primitive& p);
Primitive default_primitive(PrimitiveKind k);

class MessageValue;
using MessageValuePtr = std::shared_ptr<const MessageValue>;

/// One field slot: a primitive, a homogeneous primitive array, or a nested
/// message.
struct Value {
  std::variant<Primitive, std::vector<Primitive>, MessageValuePtr> data;

  Value() : data(Primitive{false}) {}
  Value(Primitive p) : data(std::move(p)) {}                       // NOLINT
  Value(std::vector<Primitive> a) : data(std::move(a)) {}          // NOLINT
  Value(MessageValuePtr m) : data(std::move(m)) {}                 // NOLINT

  bool operator==(const Value& other) const;
};

/// A typed message instance. Construction fills every field with its default,
/// so the "every descriptor field present" invariant holds from birth; set()
/// type-checks, so values always match their declared kinds.
class MessageValue {
 public:
  explicit MessageValue(TypeDescriptorPtr descriptor);

  const TypeDescriptorPtr& descriptor() const { return desc_; }

  Status set(std::string_view field, Value value);
  const Value* get(std::string_view field) const;
  const Value& at(size_t index) const { return values_[index]; }
  Value& slot(size_t index) { return values_[index]; }  // unchecked, codec use
  size_t size() const { return values_.size(); }

  bool operator==(const MessageValue& other) const;

 private:
  TypeDescriptorPtr desc_;
  std::vector<Value> values_;
};

/// Fields in declaration order, little-endian fixed-width primitives, strings
/// and arrays as uint32 length prefix + elements, nested messages inline. No
/// padding; byte-identical across invocations.
Result<Bytes> serialize(const MessageValue& message);

/// Inverse of serialize. Consumes exactly the encoded length: truncated and
/// trailing bytes both fail with decode_error.
Result<MessageValue> deserialize(BytesView bytes, const TypeDescriptorPtr& descriptor);

/// Decodes a prefix of `reader`, for formats that embed a message.
Result<MessageValue> decode_message(ByteReader& reader, const TypeDescriptorPtr& descriptor,
                                    size_t depth = 0);
Status encode_message(ByteWriter& writer, const MessageValue& message);

}  // namespace mbus::interfaces
