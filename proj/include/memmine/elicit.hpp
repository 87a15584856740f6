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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "memmine/entity.hpp"
#include "memmine/memgraph.hpp"
#include "memmine/prompts.hpp"
#include "memmine/responder.hpp"

namespace memmine {

// Entities found in one response.
struct Extraction {
  std::map<EntityId, int> counts;                       // occurrences
  std::map<EntityId, std::set<std::string>> surface_forms;
  bool used_responder = false;  // the assisted path produced this result

  std::set<EntityId> entities() const;
};

// Capitalized-span heuristic: maximal runs of capitalized tokens (broken at
// clause punctuation) plus standalone 4-digit years. Lone capitalized
// function words ("The", "She", ...) are dropped.
Extraction heuristic_entities(std::string_view response);

// Parses a line-delimited entity list, dropping list markers, "NONE" and
// lines that do not literally occur in `response`.
Extraction parse_entity_list(std::string_view listing, std::string_view response);

// Assisted extraction asks `responder` for an entity list (sample index
// `sample_index`); when `fallback` is set, `responder` is null, or the call
// fails, the heuristic is used instead. `exclude` (the target) never appears
// in the result.
Extraction extract_entities(std::string_view response, Responder* responder,
                            bool fallback, const EntityId& exclude,
                            int sample_index = 0);

struct ElicitationRecord {
  EntityId anchor;                          // always the target
  std::optional<EntityId> secondary_anchor; // expanded node for NeighborHop
  PromptKind prompt_kind = PromptKind::kHop0;
  std::string prompt;
  std::vector<std::string> responses;
  std::vector<std::set<EntityId>> extractions;
  std::map<EntityId, int> extraction_counts;
  std::map<EntityId, std::set<std::string>> surface_forms;

  // The node whose neighborhood this record describes.
  const EntityId& expanded() const {
    return secondary_anchor ? *secondary_anchor : anchor;
  }
};

// Fraction of responses whose extraction set contains `candidate`.
double strength(const ElicitationRecord& record, const EntityId& candidate);

struct MiningRun {
  MemoryGraph graph;
  std::vector<ElicitationRecord> records;  // in expansion order
};

// Display string used when a node's name goes into a prompt: the first
// surface form in set order, or the key when there is none.
std::string display_name(const MemoryNode& node);

// Target-conditioned iterative expansion up to config.K hops. Up to
// `parallelism` completions are in flight for one anchor; assembly order is
// (hop, anchor id, sample index) regardless of timing.
MiningRun mine_graph(const MiningConfig& config, std::string_view target,
                     std::optional<std::string> description,
                     Responder& responder, int parallelism = 4);

inline MemoryGraph expand_graph(const MiningConfig& config,
                                std::string_view target,
                                std::optional<std::string> description,
                                Responder& responder, int parallelism = 4) {
  return mine_graph(config, target, std::move(description), responder,
                    parallelism)
      .graph;
}

// Largest product of edge weights over paths target -> node, for every
// reachable node. Drives the adaptive stopping rule.
std::map<EntityId, double> best_path_strength(const MemoryGraph& graph);

}  // namespace memmine
