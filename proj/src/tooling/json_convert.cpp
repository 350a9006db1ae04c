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

#include "mbus/tooling/json_convert.hpp"

namespace mbus::tooling {

using interfaces::ArraySpec;
using interfaces::MessageValue;
using interfaces::Primitive;
using interfaces::PrimitiveKind;
using interfaces::TypeDescriptorPtr;
using interfaces::Value;
using nlohmann::json;

namespace {

Result<Primitive> json_to_primitive(PrimitiveKind kind, const json& j) {
  auto bad = [&](const char* want) -> Error {
    return Error{Errc::schema_error, std::string("expected ") + want + ", got " + j.dump()};
  };
  switch (kind) {
    case PrimitiveKind::Bool:
      if (!j.is_boolean()) return bad("bool");
      return Primitive(j.get<bool>());
    case PrimitiveKind::Int8:
      if (!j.is_number_integer()) return bad("int8");
      return Primitive(static_cast<int8_t>(j.get<int64_t>()));
    case PrimitiveKind::UInt8:
      if (!j.is_number_integer()) return bad("uint8");
      return Primitive(static_cast<uint8_t>(j.get<uint64_t>()));
    case PrimitiveKind::Int16:
      if (!j.is_number_integer()) return bad("int16");
      return Primitive(static_cast<int16_t>(j.get<int64_t>()));
    case PrimitiveKind::UInt16:
      if (!j.is_number_integer()) return bad("uint16");
      return Primitive(static_cast<uint16_t>(j.get<uint64_t>()));
    case PrimitiveKind::Int32:
      if (!j.is_number_integer()) return bad("int32");
      return Primitive(static_cast<int32_t>(j.get<int64_t>()));
    case PrimitiveKind::UInt32:
      if (!j.is_number_integer()) return bad("uint32");
      return Primitive(static_cast<uint32_t>(j.get<uint64_t>()));
    case PrimitiveKind::Int64:
      if (!j.is_number_integer()) return bad("int64");
      return Primitive(j.get<int64_t>());
    case PrimitiveKind::UInt64:
      if (!j.is_number_integer()) return bad("uint64");
      return Primitive(j.get<uint64_t>());
    case PrimitiveKind::Float32:
      if (!j.is_number()) return bad("float32");
      return Primitive(j.get<float>());
    case PrimitiveKind::Float64:
      if (!j.is_number()) return bad("float64");
      return Primitive(j.get<double>());
    case PrimitiveKind::String:
      if (!j.is_string()) return bad("string");
      return Primitive(j.get<std::string>());
  }
  return bad("primitive");
}

json primitive_to_json(const Primitive& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, float>) return static_cast<double>(v);
        else return v;
      },
      p);
}

}  // namespace

Result<MessageValue> json_to_message(const TypeDescriptorPtr& type, const json& j) {
  if (!type) return Error{Errc::validation_error, "null type"};
  if (!j.is_object()) return Error{Errc::schema_error, "expected a JSON object"};
  MessageValue msg(type);
  for (const auto& [key, value] : j.items()) {
    const auto* field = type->field(key);
    if (!field)
      return Error{Errc::schema_error, "no field '" + key + "' in " + type->name()};
    if (const auto* prim = std::get_if<PrimitiveKind>(&field->type)) {
      auto p = json_to_primitive(*prim, value);
      if (!p.ok()) return p.error();
      if (auto st = msg.set(key, Value(std::move(p.value()))); !st.ok()) return st.error();
    } else if (const auto* arr = std::get_if<ArraySpec>(&field->type)) {
      if (!value.is_array())
        return Error{Errc::schema_error, "field '" + key + "' expects an array"};
      std::vector<Primitive> elems;
      elems.reserve(value.size());
      for (const auto& e : value) {
        auto p = json_to_primitive(arr->element, e);
        if (!p.ok()) return p.error();
        elems.push_back(std::move(p.value()));
      }
      if (auto st = msg.set(key, Value(std::move(elems))); !st.ok()) return st.error();
    } else {
      const auto& nested_type = *std::get_if<TypeDescriptorPtr>(&field->type);
      auto nested = json_to_message(nested_type, value);
      if (!nested.ok()) return nested;
      if (auto st = msg.set(
              key, Value(std::make_shared<MessageValue>(std::move(nested.value()))));
          !st.ok())
        return st.error();
    }
  }
  return msg;
}

json message_to_json(const MessageValue& message) {
  json out = json::object();
  const auto& fields = message.descriptor()->fields();
  for (size_t i = 0; i < fields.size(); ++i) {
    const Value& v = message.at(i);
    if (const auto* p = std::get_if<Primitive>(&v.data)) {
      out[fields[i].name] = primitive_to_json(*p);
    } else if (const auto* arr = std::get_if<std::vector<Primitive>>(&v.data)) {
      json ja = json::array();
      for (const auto& e : *arr) ja.push_back(primitive_to_json(e));
      out[fields[i].name] = std::move(ja);
    } else {
      const auto& nested = *std::get_if<interfaces::MessageValuePtr>(&v.data);
      out[fields[i].name] = nested ? message_to_json(*nested) : json(nullptr);
    }
  }
  return out;
}

}  // namespace mbus::tooling
