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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memmine/entity.hpp"
#include "memmine/memgraph.hpp"
#include "memmine/responder.hpp"
#include "memmine/sampler.hpp"

namespace memmine {

enum class EventStatus { kOk, kUnknown };

struct EventStatement {
  std::pair<EntityId, EntityId> pair;
  EntityId target;  // the anchor named in the prompt
  std::string text;  // empty when status == kUnknown
  EventStatus status = EventStatus::kUnknown;
};

struct SupervisionSample {
  PathKind kind = PathKind::kForget;
  std::string question;
  std::string answer;
  EntityId target;
  EntityId obj;
  std::string event_text;
  std::vector<EntityId> source_path;
  // [start, end) in Unicode code points of canonical().
  std::pair<std::size_t, std::size_t> answer_span{0, 0};
  int multiplicity = 1;

  // "Question: {question} Answer: {answer}"
  std::string canonical() const;

  friend bool operator==(const SupervisionSample&, const SupervisionSample&) = default;
};

// Code-point span of the answer inside "Question: {q} Answer: {a}".
std::pair<std::size_t, std::size_t> answer_span_for(std::string_view question,
                                                    std::string_view answer);

// Substring of canonical() selected by answer_span (code points).
std::string span_text(const SupervisionSample& sample);

// Every name a node may appear under: its key plus its surface forms.
std::vector<std::string> names_of(const MemoryGraph& graph, const EntityId& id);
bool mentions_any(std::string_view text, const std::vector<std::string>& names);

// "Question: ... Answer: ..." parsing; nullopt when either part is missing.
std::optional<std::pair<std::string, std::string>> parse_qa(std::string_view text);

// First sentence of `text` (through the first '.', '!' or '?' followed by
// whitespace or end of text), trimmed, on one line.
std::string first_sentence(std::string_view text);

// Event statement for one path window, anchored at `anchor` (the target for
// forget windows, the start node for neighbor paths). A first line of
// "UNKNOWN", or a statement that does not name both pair members, yields
// kUnknown. Both pair members and the anchor must be graph nodes
// (kInvalidArgument otherwise).
EventStatement synthesize_event(const MemoryGraph& graph,
                                const std::pair<EntityId, EntityId>& pair,
                                const EntityId& anchor, Responder& responder);

// Forget QA whose answer names the target and whose question does not.
// Rejected or unparseable responses are retried once (sample index 1); a
// second failure throws kUnparseableQA. Requires an Ok event and obj in its
// pair (kInvalidArgument).
SupervisionSample synthesize_forget_qa(const MemoryGraph& graph,
                                       const EventStatement& event,
                                       const EntityId& obj, Responder& responder,
                                       const std::vector<EntityId>& source_path = {});

// Neighbor QA for a target-free path: event on the first window anchored at
// the start node, answer naming the start node, target named nowhere.
// Paths containing the target or shorter than 2 nodes are rejected with
// kInvalidArgument before any responder call. nullopt when the event is
// unknown.
std::optional<SupervisionSample> synthesize_neighbor_qa(const MemoryGraph& graph,
                                                        const MemoryPath& path,
                                                        Responder& responder);

struct DatasetStats {
  int forget_windows = 0;
  int unknown_events = 0;
  int dropped_items = 0;
  int forget_generated = 0;   // before deduplication
  int neighbor_generated = 0; // before deduplication
};

struct Datasets {
  std::vector<SupervisionSample> forget;
  std::vector<SupervisionSample> neighbor;
  DatasetStats stats;
};

// Sliding-window synthesis over forget paths (obj = earlier node of each
// window) and one QA per neighbor path. Exact (question, answer) duplicates
// collapse into the first occurrence with multiplicity incremented. Item
// failures are logged and skipped. Output order is (path index, window
// index) regardless of completion order.
Datasets build_datasets(const MemoryGraph& graph,
                        const std::vector<MemoryPath>& forget_paths,
                        const std::vector<MemoryPath>& neighbor_paths,
                        Responder& responder, int parallelism = 4);

// Subset whose fraction of correct-labelled samples is within one sample of
// `ratio`, as large as the label counts allow, chosen by a seeded shuffle
// and returned in input order. Throws kInfeasibleRatio when a required
// class is empty, kInvalidArgument on misaligned labels or ratio outside
// [0,1].
std::vector<SupervisionSample> mix_forget_set(
    const std::vector<SupervisionSample>& samples,
    const std::vector<bool>& correctness_labels, double ratio, std::uint64_t seed);

std::string dataset_to_jsonl(const std::vector<SupervisionSample>& samples);
std::vector<SupervisionSample> dataset_from_jsonl(std::string_view text);

// Writes dataset_to_jsonl(samples); returns the byte count. kIoFailure.
std::size_t emit_dataset(const std::vector<SupervisionSample>& samples,
                         const std::filesystem::path& destination);

// Checks the scoping invariants of one sample; throws kInvariantViolation.
void validate_sample(const MemoryGraph& graph, const SupervisionSample& sample);

}  // namespace memmine
