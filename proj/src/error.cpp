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

#include "memmine/error.hpp"

namespace memmine {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kEmptyMention: return "EmptyMention";
    case Errc::kOrphanNode: return "OrphanNode";
    case Errc::kEmptyNeighborhood: return "EmptyNeighborhood";
    case Errc::kSchemaError: return "SchemaError";
    case Errc::kMissingNeighbor: return "MissingNeighbor";
    case Errc::kResponderFailure: return "ResponderFailure";
    case Errc::kUnrecognizedPrompt: return "UnrecognizedPrompt";
    case Errc::kDeadEnd: return "DeadEnd";
    case Errc::kIsolatedTarget: return "IsolatedTarget";
    case Errc::kNotAPath: return "NotAPath";
    case Errc::kTooShort: return "TooShort";
    case Errc::kNoNeighbors: return "NoNeighbors";
    case Errc::kUnparseableQA: return "UnparseableQA";
    case Errc::kInfeasibleRatio: return "InfeasibleRatio";
    case Errc::kIoFailure: return "IoFailure";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kEmptyReference: return "EmptyReference";
    case Errc::kInvariantViolation: return "InvariantViolation";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace memmine
