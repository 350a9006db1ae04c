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
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mbus/bytes.hpp"
#include "mbus/result.hpp"

namespace mbus::mgmt {

enum class ParameterType : uint8_t {
  Bool = 0,
  Int64 = 1,
  Float64 = 2,
  String = 3,
  ByteArray = 4,
  BoolArray = 5,
  Int64Array = 6,
  Float64Array = 7,
  StringArray = 8,
};

using ParameterValue =
    std::variant<bool, int64_t, double, std::string, std::vector<uint8_t>, std::vector<bool>,
                 std::vector<int64_t>, std::vector<double>, std::vector<std::string>>;

ParameterType parameter_type_of(const ParameterValue& v);
const char* parameter_type_name(ParameterType t);

struct ParameterRecord {
  std::string name;
  ParameterType declared_type = ParameterType::Bool;
  ParameterValue value = false;
  bool read_only = false;
  std::string description;
};

/// Declared-and-enforced typed parameter store. The stored kind always equals
/// the declared kind: declaration pins it, set() refuses mismatches, and
/// undeclared access is an error (no auto-declaration).
class ParameterStore {
 public:
  Status declare(ParameterRecord record);
  Result<ParameterValue> get(const std::string& name) const;
  Status set(const std::string& name, ParameterValue value);
  Result<ParameterRecord> describe(const std::string& name) const;
  std::vector<std::string> list(const std::string& prefix = "") const;
  bool declared(const std::string& name) const { return records_.count(name) != 0; }

 private:
  std::map<std::string, ParameterRecord> records_;
};

// Wire form for parameter values inside service payloads and events:
// type tag byte + value (primitives LE, arrays uint32 count + elements,
// strings uint32 length + bytes).
void encode_parameter_value(ByteWriter& w, const ParameterValue& v);
Result<ParameterValue> decode_parameter_value(ByteReader& r);
Bytes parameter_value_bytes(const ParameterValue& v);
Result<ParameterValue> parameter_value_from_bytes(BytesView bytes);

std::string parameter_value_str(const ParameterValue& v);

}  // namespace mbus::mgmt
