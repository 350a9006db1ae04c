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

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace mbus {

enum class Errc {
  ok = 0,
  schema_error,        // value/descriptor mismatch, invalid descriptor
  decode_error,        // truncated, trailing bytes, malformed wire data
  foreign_packet,      // bad magic: not ours, dropped silently at the socket
  resource_exhausted,  // cache above high-water mark, queue full
  name_conflict,
  validation_error,
  timeout,
  transition_invalid,
  unknown_parameter,
  parameter_type,
  read_only,
  access_denied,
  auth_failure,
  rekey_required,
  not_found,
  io_error,
  bag_format,
  partial_result,
  unavailable,
};

const char* errc_name(Errc c);

struct Error {
  Errc code = Errc::ok;
  std::string message;
};

/// Minimal expected-like carrier: a value or an Error.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : data_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Error err) : data_(std::move(err)) {}  // NOLINT(google-explicit-constructor)
  Result(Errc code, std::string message) : data_(Error{code, std::move(message)}) {}

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(data_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(data_);
  }
  T value_or(T fallback) const { return ok() ? std::get<T>(data_) : std::move(fallback); }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(data_);
  }
  Errc code() const { return ok() ? Errc::ok : error().code; }

 private:
  std::variant<T, Error> data_;
};

/// Result<void>: success or an Error.
class [[nodiscard]] Status {
 public:
  Status() = default;
  Status(Error err) : err_(std::move(err)) {}  // NOLINT(google-explicit-constructor)
  Status(Errc code, std::string message) : err_{code, std::move(message)} {}

  static Status success() { return Status(); }

  bool ok() const { return err_.code == Errc::ok; }
  explicit operator bool() const { return ok(); }
  const Error& error() const { return err_; }
  Errc code() const { return err_.code; }

 private:
  Error err_;
};

}  // namespace mbus
