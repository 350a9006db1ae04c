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

#include "mbus/interfaces/message_value.hpp"

namespace mbus::interfaces {

namespace {

Value default_value(const FieldType& type) {
  if (const auto* prim = std::get_if<PrimitiveKind>(&type)) return Value(default_primitive(*prim));
  if (const auto* arr = std::get_if<ArraySpec>(&type)) {
    std::vector<Primitive> elems;
    if (!arr->bounded) elems.assign(arr->length, default_primitive(arr->element));
    return Value(std::move(elems));
  }
  const auto& nested = *std::get_if<TypeDescriptorPtr>(&type);
  return Value(std::make_shared<MessageValue>(nested));
}

bool value_matches(const FieldType& type, const Value& v) {
  if (const auto* prim = std::get_if<PrimitiveKind>(&type)) {
    const auto* pv = std::get_if<Primitive>(&v.data);
    return pv && primitive_kind_of(*pv) == *prim;
  }
  if (const auto* arr = std::get_if<ArraySpec>(&type)) {
    const auto* av = std::get_if<std::vector<Primitive>>(&v.data);
    if (!av) return false;
    if (arr->bounded ? av->size() > arr->length : av->size() != arr->length) return false;
    for (const auto& e : *av)
      if (primitive_kind_of(e) != arr->element) return false;
    return true;
  }
  const auto& nested = *std::get_if<TypeDescriptorPtr>(&type);
  const auto* mv = std::get_if<MessageValuePtr>(&v.data);
  return mv && *mv && (*mv)->descriptor()->structurally_equal(*nested);
}

void encode_primitive(ByteWriter& w, const Primitive& p) {
  std::visit(
      [&w](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) w.u8(v ? 1 : 0);
        else if constexpr (std::is_same_v<T, int8_t>) w.i8(v);
        else if constexpr (std::is_same_v<T, uint8_t>) w.u8(v);
        else if constexpr (std::is_same_v<T, int16_t>) w.i16(v);
        else if constexpr (std::is_same_v<T, uint16_t>) w.u16(v);
        else if constexpr (std::is_same_v<T, int32_t>) w.i32(v);
        else if constexpr (std::is_same_v<T, uint32_t>) w.u32(v);
        else if constexpr (std::is_same_v<T, int64_t>) w.i64(v);
        else if constexpr (std::is_same_v<T, uint64_t>) w.u64(v);
        else if constexpr (std::is_same_v<T, float>) w.f32(v);
        else if constexpr (std::is_same_v<T, double>) w.f64(v);
        else w.str(v);
      },
      p);
}

Primitive decode_primitive(ByteReader& r, PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Bool: return r.u8() != 0;
    case PrimitiveKind::Int8: return r.i8();
    case PrimitiveKind::UInt8: return r.u8();
    case PrimitiveKind::Int16: return r.i16();
    case PrimitiveKind::UInt16: return r.u16();
    case PrimitiveKind::Int32: return r.i32();
    case PrimitiveKind::UInt32: return r.u32();
    case PrimitiveKind::Int64: return r.i64();
    case PrimitiveKind::UInt64: return r.u64();
    case PrimitiveKind::Float32: return r.f32();
    case PrimitiveKind::Float64: return r.f64();
    case PrimitiveKind::String: return r.str();
  }
  return false;
}

// uint8/int8 arrays move as one block; the wire layout is identical.
void encode_array(ByteWriter& w, const std::vector<Primitive>& elems, PrimitiveKind k) {
  w.u32(static_cast<uint32_t>(elems.size()));
  if (k == PrimitiveKind::UInt8) {
    for (const auto& e : elems) w.u8(*std::get_if<uint8_t>(&e));
    return;
  }
  for (const auto& e : elems) encode_primitive(w, e);
}

}  // namespace

PrimitiveKind primitive_kind_of(const Primitive& p) {
  return static_cast<PrimitiveKind>(p.index());
}

Primitive default_primitive(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Bool: return false;
    case PrimitiveKind::Int8: return int8_t{0};
    case PrimitiveKind::UInt8: return uint8_t{0};
    case PrimitiveKind::Int16: return int16_t{0};
    case PrimitiveKind::UInt16: return uint16_t{0};
    case PrimitiveKind::Int32: return int32_t{0};
    case PrimitiveKind::UInt32: return uint32_t{0};
    case PrimitiveKind::Int64: return int64_t{0};
    case PrimitiveKind::UInt64: return uint64_t{0};
    case PrimitiveKind::Float32: return 0.0f;
    case PrimitiveKind::Float64: return 0.0;
    case PrimitiveKind::String: return std::string{};
  }
  return false;
}

bool Value::operator==(const Value& other) const {
  if (data.index() != other.data.index()) return false;
  if (const auto* m = std::get_if<MessageValuePtr>(&data)) {
    const auto& om = *std::get_if<MessageValuePtr>(&other.data);
    if (!*m || !om) return *m == om;
    return **m == *om;
  }
  return data == other.data;
}

MessageValue::MessageValue(TypeDescriptorPtr descriptor) : desc_(std::move(descriptor)) {
  values_.reserve(desc_->fields().size());
  for (const auto& f : desc_->fields()) values_.push_back(default_value(f.type));
}

Status MessageValue::set(std::string_view field, Value value) {
  int i = desc_->field_index(field);
  if (i < 0)
    return Error{Errc::schema_error,
                 "no field '" + std::string(field) + "' in " + desc_->name()};
  if (!value_matches(desc_->fields()[static_cast<size_t>(i)].type, value))
    return Error{Errc::schema_error,
                 "value kind mismatch for field '" + std::string(field) + "' in " + desc_->name()};
  values_[static_cast<size_t>(i)] = std::move(value);
  return {};
}

const Value* MessageValue::get(std::string_view field) const {
  int i = desc_->field_index(field);
  return i < 0 ? nullptr : &values_[static_cast<size_t>(i)];
}

bool MessageValue::operator==(const MessageValue& other) const {
  if (!desc_->structurally_equal(*other.desc_)) return false;
  return values_ == other.values_;
}

Status encode_message(ByteWriter& w, const MessageValue& message) {
  const auto& fields = message.descriptor()->fields();
  for (size_t i = 0; i < fields.size(); ++i) {
    const Value& v = message.at(i);
    if (!value_matches(fields[i].type, v))
      return Error{Errc::schema_error, "field '" + fields[i].name + "' does not match " +
                                           message.descriptor()->name()};
    if (const auto* pv = std::get_if<Primitive>(&v.data)) {
      encode_primitive(w, *pv);
    } else if (const auto* av = std::get_if<std::vector<Primitive>>(&v.data)) {
      encode_array(w, *av, std::get<ArraySpec>(fields[i].type).element);
    } else {
      if (auto st = encode_message(w, **std::get_if<MessageValuePtr>(&v.data)); !st.ok())
        return st;
    }
  }
  return {};
}

Result<Bytes> serialize(const MessageValue& message) {
  ByteWriter w(64);
  if (auto st = encode_message(w, message); !st.ok()) return st.error();
  return w.take();
}

Result<MessageValue> decode_message(ByteReader& r, const TypeDescriptorPtr& descriptor,
                                    size_t depth) {
  if (depth > TypeDescriptor::kMaxNestingDepth)
    return Error{Errc::decode_error, "nesting too deep"};
  MessageValue msg(descriptor);
  const auto& fields = descriptor->fields();
  for (size_t i = 0; i < fields.size(); ++i) {
    if (const auto* prim = std::get_if<PrimitiveKind>(&fields[i].type)) {
      msg.slot(i) = Value(decode_primitive(r, *prim));
    } else if (const auto* arr = std::get_if<ArraySpec>(&fields[i].type)) {
      uint32_t n = r.u32();
      if (arr->bounded ? n > arr->length : n != arr->length)
        return Error{Errc::decode_error,
                     "array length " + std::to_string(n) + " out of range for field '" +
                         fields[i].name + "'"};
      // Guard length claims against the bytes actually present.
      size_t width = primitive_wire_width(arr->element);
      if (width > 0 && r.remaining() < size_t{n} * width)
        return Error{Errc::decode_error, "truncated array in field '" + fields[i].name + "'"};
      std::vector<Primitive> elems;
      elems.reserve(n);
      for (uint32_t j = 0; j < n; ++j) elems.push_back(decode_primitive(r, arr->element));
      msg.slot(i) = Value(std::move(elems));
    } else {
      auto nested = decode_message(r, *std::get_if<TypeDescriptorPtr>(&fields[i].type), depth + 1);
      if (!nested.ok()) return nested.error();
      msg.slot(i) = Value(std::make_shared<MessageValue>(std::move(nested.value())));
    }
    if (!r.ok()) return Error{Errc::decode_error, "truncated input in " + descriptor->name()};
  }
  return msg;
}

Result<MessageValue> deserialize(BytesView bytes, const TypeDescriptorPtr& descriptor) {
  ByteReader r(bytes);
  auto msg = decode_message(r, descriptor);
  if (!msg.ok()) return msg;
  if (!r.ok()) return Error{Errc::decode_error, "truncated input"};
  if (!r.exhausted())
    return Error{Errc::decode_error,
                 std::to_string(r.remaining()) + " trailing bytes after " + descriptor->name()};
  return msg;
}

}  // namespace mbus::interfaces
