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

#include "mbus/interfaces/type_descriptor.hpp"

#include <algorithm>
#include <unordered_set>

namespace mbus::interfaces {

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr uint8_t kTagPrimitive = 0x01;
constexpr uint8_t kTagArray = 0x02;
constexpr uint8_t kTagNestedBegin = 0x03;
constexpr uint8_t kTagNestedEnd = 0x04;

bool name_ok(std::string_view s) {
  return !s.empty() && s.find('\0') == std::string_view::npos;
}

size_t nesting_depth(const TypeDescriptor& d) {
  size_t depth = 1;
  for (const auto& f : d.fields()) {
    if (const auto* nested = std::get_if<TypeDescriptorPtr>(&f.type)) {
      depth = std::max(depth, 1 + nesting_depth(**nested));
    }
  }
  return depth;
}

void append_canonical(ByteWriter& w, const TypeDescriptor& d) {
  w.raw(d.name().data(), d.name().size());
  w.u8(0);
  for (const auto& f : d.fields()) {
    w.raw(f.name.data(), f.name.size());
    w.u8(0);
    if (const auto* prim = std::get_if<PrimitiveKind>(&f.type)) {
      w.u8(kTagPrimitive);
      w.u8(static_cast<uint8_t>(*prim));
    } else if (const auto* arr = std::get_if<ArraySpec>(&f.type)) {
      w.u8(kTagArray);
      w.u8(static_cast<uint8_t>(arr->element));
      w.u8(arr->bounded ? 1 : 0);
      w.u32(arr->length);
    } else {
      w.u8(kTagNestedBegin);
      append_canonical(w, **std::get_if<TypeDescriptorPtr>(&f.type));
      w.u8(kTagNestedEnd);
    }
  }
}

}  // namespace

const char* primitive_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Bool: return "bool";
    case PrimitiveKind::Int8: return "int8";
    case PrimitiveKind::UInt8: return "uint8";
    case PrimitiveKind::Int16: return "int16";
    case PrimitiveKind::UInt16: return "uint16";
    case PrimitiveKind::Int32: return "int32";
    case PrimitiveKind::UInt32: return "uint32";
    case PrimitiveKind::Int64: return "int64";
    case PrimitiveKind::UInt64: return "uint64";
    case PrimitiveKind::Float32: return "float32";
    case PrimitiveKind::Float64: return "float64";
    case PrimitiveKind::String: return "string";
  }
  return "?";
}

std::optional<PrimitiveKind> primitive_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(PrimitiveKind::String); ++i) {
    auto k = static_cast<PrimitiveKind>(i);
    if (name == primitive_name(k)) return k;
  }
  return std::nullopt;
}

size_t primitive_wire_width(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Bool:
    case PrimitiveKind::Int8:
    case PrimitiveKind::UInt8: return 1;
    case PrimitiveKind::Int16:
    case PrimitiveKind::UInt16: return 2;
    case PrimitiveKind::Int32:
    case PrimitiveKind::UInt32:
    case PrimitiveKind::Float32: return 4;
    case PrimitiveKind::Int64:
    case PrimitiveKind::UInt64:
    case PrimitiveKind::Float64: return 8;
    case PrimitiveKind::String: return 0;
  }
  return 0;
}

TypeDescriptor::TypeDescriptor(std::string name, std::vector<FieldDescriptor> fields)
    : name_(std::move(name)), fields_(std::move(fields)) {
  hash_ = fnv1a64(canonical_bytes());
}

Result<TypeDescriptorPtr> TypeDescriptor::make(std::string name,
                                               std::vector<FieldDescriptor> fields) {
  if (!name_ok(name)) return Error{Errc::schema_error, "type name empty or contains NUL"};
  std::unordered_set<std::string_view> seen;
  for (const auto& f : fields) {
    if (!name_ok(f.name))
      return Error{Errc::schema_error, "field name empty or contains NUL in " + name};
    if (!seen.insert(f.name).second)
      return Error{Errc::schema_error, "duplicate field '" + f.name + "' in " + name};
    if (const auto* nested = std::get_if<TypeDescriptorPtr>(&f.type)) {
      if (!*nested) return Error{Errc::schema_error, "null nested descriptor in " + name};
    }
    if (const auto* arr = std::get_if<ArraySpec>(&f.type)) {
      if (!arr->bounded && arr->length == 0)
        return Error{Errc::schema_error, "fixed array of length 0 in " + name};
    }
  }
  auto desc = TypeDescriptorPtr(new TypeDescriptor(std::move(name), std::move(fields)));
  if (nesting_depth(*desc) > kMaxNestingDepth)
    return Error{Errc::schema_error, "nesting deeper than allowed in " + desc->name()};
  return desc;
}

const FieldDescriptor* TypeDescriptor::field(std::string_view name) const {
  int i = field_index(name);
  return i < 0 ? nullptr : &fields_[static_cast<size_t>(i)];
}

int TypeDescriptor::field_index(std::string_view name) const {
  for (size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i].name == name) return static_cast<int>(i);
  return -1;
}

Bytes TypeDescriptor::canonical_bytes() const {
  ByteWriter w;
  append_canonical(w, *this);
  return w.take();
}

bool TypeDescriptor::structurally_equal(const TypeDescriptor& other) const {
  return hash_ == other.hash_ && canonical_bytes() == other.canonical_bytes();
}

uint64_t fnv1a64(BytesView data) {
  uint64_t h = kFnvOffset;
  for (uint8_t b : data) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

Result<uint64_t> compute_type_hash(const TypeDescriptor& descriptor) {
  // make() enforced the invariants; descriptors reachable here are valid.
  return descriptor.hash();
}

uint64_t compute_topic_id(std::string_view topic, uint64_t type_hash) {
  ByteWriter w(topic.size() + 9);
  w.raw(topic.data(), topic.size());
  w.u8(0);
  w.u64(type_hash);
  return fnv1a64(BytesView(w.data()));
}

}  // namespace mbus::interfaces
