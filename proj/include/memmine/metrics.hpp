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
#include <string>
#include <string_view>
#include <vector>

#include "memmine/entity.hpp"
#include "memmine/memgraph.hpp"

namespace memmine {

// Entity -> non-negative mass. Entries need not sum to 1.
using FrequencyDistribution = std::map<EntityId, double>;

// Top-k entities by mass, ties broken by id ascending.
std::vector<EntityId> top_k(const FrequencyDistribution& dist, std::size_t k);

// Jaccard similarity of the top-k sets. Throws kEmptyInput when either
// distribution is empty, kInvalidArgument when k is 0.
double jaccard_topk(const FrequencyDistribution& a, const FrequencyDistribution& b,
                    std::size_t k = 50);

// Cosine over the union support (missing entries are 0), clamped to [0,1].
// kEmptyInput if either vector has zero norm.
double frequency_cosine(const FrequencyDistribution& a, const FrequencyDistribution& b);

// Case-folded whitespace tokens.
std::vector<std::string> tokenize(std::string_view text);

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

// LCS(candidate, reference) / |reference| over tokens. kEmptyReference when
// the reference has no tokens.
double rouge_l_recall(std::string_view candidate, std::string_view reference);

struct RecoveryFidelity {
  double precision = 0.0;  // |mined ∩ truth| / |mined|, 1.0 when nothing mined
  double recall = 0.0;     // |mined ∩ truth| / |truth|, 1.0 when truth empty
};

// Compares mined non-target nodes against a ground-truth entity set.
RecoveryFidelity recovery_fidelity(const MemoryGraph& graph,
                                   const std::vector<EntityId>& truth);

// Same, with the truth set taken from another graph (e.g. expected_graph).
RecoveryFidelity recovery_fidelity(const MemoryGraph& mined, const MemoryGraph& expected);

// Node strengths of all non-target nodes, normalized to sum 1.
FrequencyDistribution graph_distribution(const MemoryGraph& graph);

// {"entity": mass, ...} or [{"id": ..., "mass": ...}, ...].
FrequencyDistribution parse_distribution(std::string_view json);

}  // namespace memmine
