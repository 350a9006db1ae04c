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

#include "mbus/mgmt/parameters.hpp"

namespace mbus::mgmt {

ParameterType parameter_type_of(const ParameterValue& v) {
  return static_cast<ParameterType>(v.index());
}

const char* parameter_type_name(ParameterType t) {
  switch (t) {
    case ParameterType::Bool: return "bool";
    case ParameterType::Int64: return "int64";
    case ParameterType::Float64: return "float64";
    case ParameterType::String: return "string";
    case ParameterType::ByteArray: return "byte_array";
    case ParameterType::BoolArray: return "bool_array";
    case ParameterType::Int64Array: return "int64_array";
    case ParameterType::Float64Array: return "float64_array";
    case ParameterType::StringArray: return "string_array";
  }
  return "?";
}

Status ParameterStore::declare(ParameterRecord record) {
  if (record.name.empty()) return Error{Errc::validation_error, "empty parameter name"};
  if (parameter_type_of(record.value) != record.declared_type)
    return Error{Errc::parameter_type,
                 "initial value kind does not match declared type for '" + record.name + "'"};
  auto [it, inserted] = records_.try_emplace(record.name, std::move(record));
  if (!inserted)
    return Error{Errc::name_conflict, "parameter '" + it->first + "' already declared"};
  return {};
}

Result<ParameterValue> ParameterStore::get(const std::string& name) const {
  auto it = records_.find(name);
  if (it == records_.end())
    return Error{Errc::unknown_parameter, "parameter '" + name + "' not declared"};
  return it->second.value;
}

Status ParameterStore::set(const std::string& name, ParameterValue value) {
  auto it = records_.find(name);
  if (it == records_.end())
    return Error{Errc::unknown_parameter, "parameter '" + name + "' not declared"};
  if (it->second.read_only)
    return Error{Errc::read_only, "parameter '" + name + "' is read-only"};
  if (parameter_type_of(value) != it->second.declared_type)
    return Error{Errc::parameter_type,
                 "value kind " + std::string(parameter_type_name(parameter_type_of(value))) +
                     " does not match declared " +
                     parameter_type_name(it->second.declared_type) + " for '" + name + "'"};
  it->second.value = std::move(value);
  return {};
}

Result<ParameterRecord> ParameterStore::describe(const std::string& name) const {
  auto it = records_.find(name);
  if (it == records_.end())
    return Error{Errc::unknown_parameter, "parameter '" + name + "' not declared"};
  return it->second;
}

std::vector<std::string> ParameterStore::list(const std::string& prefix) const {
  std::vector<std::string> names;
  for (const auto& [name, rec] : records_)
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  return names;
}

void encode_parameter_value(ByteWriter& w, const ParameterValue& v) {
  w.u8(static_cast<uint8_t>(parameter_type_of(v)));
  std::visit(
      [&w](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          w.u8(x ? 1 : 0);
        } else if constexpr (std::is_same_v<T, int64_t>) {
          w.i64(x);
        } else if constexpr (std::is_same_v<T, double>) {
          w.f64(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          w.str(x);
        } else if constexpr (std::is_same_v<T, std::vector<uint8_t>>) {
          w.blob(x);
        } else if constexpr (std::is_same_v<T, std::vector<bool>>) {
          w.u32(static_cast<uint32_t>(x.size()));
          for (bool b : x) w.u8(b ? 1 : 0);
        } else if constexpr (std::is_same_v<T, std::vector<int64_t>>) {
          w.u32(static_cast<uint32_t>(x.size()));
          for (int64_t i : x) w.i64(i);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          w.u32(static_cast<uint32_t>(x.size()));
          for (double d : x) w.f64(d);
        } else {
          w.u32(static_cast<uint32_t>(x.size()));
          for (const auto& s : x) w.str(s);
        }
      },
      v);
}

Result<ParameterValue> decode_parameter_value(ByteReader& r) {
  uint8_t tag = r.u8();
  if (tag > static_cast<uint8_t>(ParameterType::StringArray))
    return Error{Errc::decode_error, "bad parameter type tag"};
  ParameterValue v;
  switch (static_cast<ParameterType>(tag)) {
    case ParameterType::Bool: v = r.u8() != 0; break;
    case ParameterType::Int64: v = r.i64(); break;
    case ParameterType::Float64: v = r.f64(); break;
    case ParameterType::String: v = r.str(); break;
    case ParameterType::ByteArray: v = r.blob(); break;
    case ParameterType::BoolArray: {
      uint32_t n = r.u32();
      if (r.remaining() < n) return Error{Errc::decode_error, "truncated bool array"};
      std::vector<bool> out(n);
      for (uint32_t i = 0; i < n; ++i) out[i] = r.u8() != 0;
      v = std::move(out);
      break;
    }
    case ParameterType::Int64Array: {
      uint32_t n = r.u32();
      if (r.remaining() < size_t{n} * 8) return Error{Errc::decode_error, "truncated array"};
      std::vector<int64_t> out(n);
      for (uint32_t i = 0; i < n; ++i) out[i] = r.i64();
      v = std::move(out);
      break;
    }
    case ParameterType::Float64Array: {
      uint32_t n = r.u32();
      if (r.remaining() < size_t{n} * 8) return Error{Errc::decode_error, "truncated array"};
      std::vector<double> out(n);
      for (uint32_t i = 0; i < n; ++i) out[i] = r.f64();
      v = std::move(out);
      break;
    }
    case ParameterType::StringArray: {
      uint32_t n = r.u32();
      if (n > r.remaining()) return Error{Errc::decode_error, "truncated string array"};
      std::vector<std::string> out;
      out.reserve(n);
      for (uint32_t i = 0; i < n; ++i) out.push_back(r.str());
      v = std::move(out);
      break;
    }
  }
  if (!r.ok()) return Error{Errc::decode_error, "truncated parameter value"};
  return v;
}

Bytes parameter_value_bytes(const ParameterValue& v) {
  ByteWriter w(32);
  encode_parameter_value(w, v);
  return w.take();
}

Result<ParameterValue> parameter_value_from_bytes(BytesView bytes) {
  ByteReader r(bytes);
  auto v = decode_parameter_value(r);
  if (!v.ok()) return v;
  if (!r.exhausted()) return Error{Errc::decode_error, "trailing bytes in parameter value"};
  return v;
}

std::string parameter_value_str(const ParameterValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, std::string>) return x;
        else return "<array[" + std::to_string(x.size()) + "]>";
      },
      v);
}

}  // namespace mbus::mgmt
