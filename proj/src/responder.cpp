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

#include "memmine/responder.hpp"

#include <fstream>
#include <sstream>

#include "memmine/error.hpp"
#include "memmine/io.hpp"
#include "memmine/json_fields.hpp"
#include "memmine/rng.hpp"

namespace memmine {

void TranscriptLog::record(TranscriptEntry entry) {
  std::lock_guard lock(mu_);
  auto key = std::make_pair(entry.prompt, entry.sample_index);
  entries_.try_emplace(std::move(key), std::move(entry));
}

std::vector<TranscriptEntry> TranscriptLog::entries() const {
  std::lock_guard lock(mu_);
  std::vector<TranscriptEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

std::size_t TranscriptLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string TranscriptLog::to_jsonl() const {
  std::string out;
  for (const auto& e : entries()) {
    nlohmann::ordered_json j;
    j["prompt"] = e.prompt;
    j["sample_index"] = e.sample_index;
    j["completion"] = e.completion;
    if (!e.exchange.is_null()) j["exchange"] = e.exchange;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void TranscriptLog::write(const std::filesystem::path& path) const {
  write_file(path, to_jsonl());
}

std::vector<TranscriptEntry> TranscriptLog::parse_jsonl(std::string_view text) {
  std::vector<TranscriptEntry> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = parse_json_document(line);
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, where);
    }
    const FieldReader r(j, where);
    TranscriptEntry e;
    e.prompt = r.get<std::string>("prompt");
    e.sample_index = r.get<int>("sample_index");
    e.completion = r.get<std::string>("completion");
    if (auto it = j.find("exchange"); it != j.end()) e.exchange = *it;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TranscriptEntry> TranscriptLog::load(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path));
}

std::string RecordingResponder::complete(const std::string& prompt,
                                         int sample_index) {
  std::string completion = inner_.complete(prompt, sample_index);
  log_.record(TranscriptEntry{prompt, sample_index, completion, nullptr});
  return completion;
}

ReplayResponder::ReplayResponder(const std::vector<TranscriptEntry>& entries,
                                 TranscriptLog* sink)
    : sink_(sink) {
  for (const auto& e : entries) {
    entries_.try_emplace(std::make_pair(e.prompt, e.sample_index), e);
  }
}

std::string ReplayResponder::complete(const std::string& prompt,
                                      int sample_index) {
  auto it = entries_.find(std::make_pair(prompt, sample_index));
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "transcript has no completion for sample " << sample_index
        << " of prompt " << std::hex << fnv1a64(prompt) << " ("
        << prompt.substr(0, prompt.find('\n')) << ")";
    throw Error(Errc::kResponderFailure, msg.str());
  }
  if (sink_) sink_->record(it->second);
  return it->second.completion;
}

}  // namespace memmine
