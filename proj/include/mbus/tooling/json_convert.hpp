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

#include <json.hpp>

#include "mbus/interfaces/message_value.hpp"

namespace mbus::tooling {

/// JSON <-> MessageValue bridging for the CLI (`topic pub --data`, `topic
/// echo`, `service call`). Missing JSON fields keep their defaults; unknown
/// fields are errors.
Result<interfaces::MessageValue> json_to_message(const interfaces::TypeDescriptorPtr& type,
                                                 const nlohmann::json& j);
nlohmann::json message_to_json(const interfaces::MessageValue& message);

}  // namespace mbus::tooling
