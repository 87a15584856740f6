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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "memmine/http_responder.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "memmine/error.hpp"

namespace memmine {
namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw Error(Errc::kConfigError, "endpoint must be an absolute http(s) URL: " + url);
  }
  const std::string prefix = url.substr(0, scheme);
  if (prefix != "http" && prefix != "https") {
    throw Error(Errc::kConfigError, "unsupported endpoint scheme: " + url);
  }
  const std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpResponder::HttpResponder(HttpResponderConfig config, TranscriptLog* log)
    : config_(std::move(config)), log_(log) {
  if (config_.model.empty()) throw Error(Errc::kConfigError, "responder.model is empty");
  if (config_.retries < 0) throw Error(Errc::kConfigError, "responder.retries must be >= 0");
  if (!(config_.timeout_seconds > 0.0)) {
    throw Error(Errc::kConfigError, "responder.timeout_seconds must be > 0");
  }
  std::tie(origin_, path_) = split_url(config_.endpoint);
}

std::string HttpResponder::complete(const std::string& prompt, int sample_index) {
  nlohmann::ordered_json request;
  request["model"] = config_.model;
  request["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
  request["temperature"] = config_.temperature;
  request["seed"] = config_.seed + static_cast<std::uint64_t>(sample_index);
  const std::string body = request.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  std::string last_error;
  double backoff = config_.backoff_seconds;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("chat request failed ({}); retry {}/{}", last_error, attempt,
                   config_.retries);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (retryable(res->status)) continue;
      break;
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
      std::string content =
          reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (log_) {
        log_->record(TranscriptEntry{
            prompt, sample_index, content,
            nlohmann::json{{"request", nlohmann::json::parse(body)},
                           {"response", reply}}});
      }
      return content;
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed completion body: ") + e.what();
      break;
    }
  }
  throw Error(Errc::kResponderFailure, origin_ + path_ + ": " + last_error);
}

}  // namespace memmine
