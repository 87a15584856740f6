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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memmine {

enum class Errc {
  kEmptyMention,
  kOrphanNode,
  kEmptyNeighborhood,
  kSchemaError,
  kMissingNeighbor,
  kResponderFailure,
  kUnrecognizedPrompt,
  kDeadEnd,
  kIsolatedTarget,
  kNotAPath,
  kTooShort,
  kNoNeighbors,
  kUnparseableQA,
  kInfeasibleRatio,
  kIoFailure,
  kEmptyInput,
  kEmptyReference,
  kInvariantViolation,
  kConfigError,
  kInvalidArgument,
};

std::string_view errc_name(Errc code);

// All library failures are reported through this exception; `code()` is the
// stable discriminator, `what()` carries "<Name>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace memmine
