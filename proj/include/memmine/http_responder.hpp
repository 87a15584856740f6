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

#include <cstdint>
#include <string>

#include "memmine/responder.hpp"

namespace memmine {

struct HttpResponderConfig {
  // Full URL of the chat-completions route, e.g.
  // "https://api.openai.com/v1/chat/completions".
  std::string endpoint;
  std::string model;
  double temperature = 1.0;
  double timeout_seconds = 60.0;
  int retries = 3;                 // extra attempts after the first
  double backoff_seconds = 1.0;    // doubled after each failed attempt
  std::string api_key_env = "OPENAI_API_KEY";
  std::uint64_t seed = 0;          // request seed is seed + sample_index
};

// Chat-completions client. Network errors, 429 and 5xx are retried with
// exponential backoff; other statuses and malformed bodies fail at once.
// Failures surface as kResponderFailure. When a log is given, every served
// call is recorded together with the raw request and response bodies.
class HttpResponder final : public Responder {
 public:
  explicit HttpResponder(HttpResponderConfig config, TranscriptLog* log = nullptr);
  std::string complete(const std::string& prompt, int sample_index) override;

 private:
  HttpResponderConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  TranscriptLog* log_;
};

}  // namespace memmine
