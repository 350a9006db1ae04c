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

#include <map>
#include <string>
#include <vector>

#include "mbus/interfaces/type_descriptor.hpp"

namespace mbus::interfaces {

/// Plain-text schema loader. Grammar (one field per line):
///
///   # comment, blank lines ignored
///   type demo/Vector3
///     x: float64
///     y: float64
///     z: float64
///   type demo/Twist
///     linear: demo/Vector3        # nested: must be declared earlier
///     angular: demo/Vector3
///   type demo/Scan
///     ranges: float32[<=1024]     # bounded array, up to 1024 elements
///     pose: float64[3]            # fixed array, exactly 3 elements
///     frame: string
///
/// Primitive kinds: bool int8 uint8 int16 uint16 int32 uint32 int64 uint64
/// float32 float64 string. Arrays hold primitives only. Nested references
/// resolve against types already registered, so recursion cannot be written.
class SchemaRegistry {
 public:
  Status load_file(const std::string& path);
  Status load_text(std::string_view text, const std::string& origin = "<text>");

  /// Loads every *.schema file in a directory. Missing directory is an error;
  /// an empty one is fine.
  Status load_directory(const std::string& dir);

  Status add(TypeDescriptorPtr descriptor);
  TypeDescriptorPtr find(std::string_view type_name) const;
  std::vector<std::string> type_names() const;

 private:
  std::map<std::string, TypeDescriptorPtr, std::less<>> types_;
};

/// Registry preloaded with the bundled demo/tooling types (demo/Value,
/// perf/Sample, rpc demo types...). The CLI extends it from MBUS_SCHEMA_PATH.
SchemaRegistry builtin_schemas();

}  // namespace mbus::interfaces
