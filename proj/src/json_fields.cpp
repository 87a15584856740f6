// Copyright 2026 The memmine Authors
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

#include "memmine/json_fields.hpp"

namespace memmine {

nlohmann::json parse_json_document(std::string_view bytes) {
  nlohmann::json doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(Errc::kSchemaError, "<document>: not valid JSON");
  }
  if (!doc.is_object()) {
    throw Error(Errc::kSchemaError, "<document>: root must be an object");
  }
  return doc;
}

}  // namespace memmine
