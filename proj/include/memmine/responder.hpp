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

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace memmine {

// Text-generation backend. Implementations must be safe to call from several
// threads at once; `sample_index` distinguishes repeated draws of the same
// prompt. Failures are reported as Error(kResponderFailure).
class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::string complete(const std::string& prompt, int sample_index) = 0;
};

// Adapts any callable; handy for tests and one-off backends.
class FunctionResponder final : public Responder {
 public:
  using Fn = std::function<std::string(const std::string&, int)>;
  explicit FunctionResponder(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt, int sample_index) override {
    return fn_(prompt, sample_index);
  }

 private:
  Fn fn_;
};

struct TranscriptEntry {
  std::string prompt;
  int sample_index = 0;
  std::string completion;
  // Raw wire exchange ({"request": ..., "response": ...}) when the backend
  // has one; null otherwise.
  nlohmann::json exchange;
};

// Thread-safe record of (prompt, sample_index) -> completion. Entries are
// kept sorted by key so the written file does not depend on completion
// timing; the first completion recorded for a key wins.
class TranscriptLog {
 public:
  void record(TranscriptEntry entry);
  std::vector<TranscriptEntry> entries() const;
  std::size_t size() const;

  std::string to_jsonl() const;
  void write(const std::filesystem::path& path) const;

  // Throws kSchemaError("line <n>: <field>") on malformed lines and
  // kIoFailure when the file cannot be read.
  static std::vector<TranscriptEntry> parse_jsonl(std::string_view text);
  static std::vector<TranscriptEntry> load(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, int>, TranscriptEntry> entries_;
};

// Wraps a responder and records every successful completion.
class RecordingResponder final : public Responder {
 public:
  RecordingResponder(Responder& inner, TranscriptLog& log)
      : inner_(inner), log_(log) {}
  std::string complete(const std::string& prompt, int sample_index) override;

 private:
  Responder& inner_;
  TranscriptLog& log_;
};

// Serves completions from a recorded transcript; bit-deterministic. A miss
// is a ResponderFailure. When `sink` is set, every served entry is copied
// into it unchanged so a replayed run rewrites an identical transcript.
class ReplayResponder final : public Responder {
 public:
  explicit ReplayResponder(const std::vector<TranscriptEntry>& entries,
                           TranscriptLog* sink = nullptr);
  std::string complete(const std::string& prompt, int sample_index) override;

 private:
  std::map<std::pair<std::string, int>, TranscriptEntry> entries_;
  TranscriptLog* sink_;
};

}  // namespace memmine
