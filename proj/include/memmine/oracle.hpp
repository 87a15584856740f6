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

// Synthetic responder backed by a ground-truth fact graph. It stands in for a
// real model so that every pipeline stage can be checked against known
// memorization.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "memmine/entity.hpp"
#include "memmine/memgraph.hpp"
#include "memmine/responder.hpp"

namespace memmine {

struct OracleFact {
  std::string subject;   // display form
  std::string object;    // display form
  std::string statement_template = "{subject} is associated with {object}.";
  double recall_prob = 1.0;

  EntityId subject_id() const { return EntityId::from_mention(subject); }
  EntityId object_id() const { return EntityId::from_mention(object); }
  std::string render() const;
};

struct OracleWorld {
  std::vector<OracleFact> facts;
  std::vector<std::string> hallucination_pool;
  // Per-response probability of one hallucinated mention, drawn uniformly
  // from the pool.
  double hallucination_prob = 0.0;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument on self facts, probabilities out of range,
  // templates missing a placeholder, or a pool that overlaps fact entities.
  void validate() const;

  // Every entity the world knows, keyed by id, with its display form.
  std::map<EntityId, std::string> entities() const;

  // World entities mentioned in `line`, in id order.
  std::vector<EntityId> mentioned_in(std::string_view line) const;

  static OracleWorld from_json(std::string_view bytes);
  static OracleWorld load(const std::filesystem::path& path);
  std::string to_json() const;
};

// Stateless given the world; safe for unlimited concurrent calls. Each call
// draws from an RNG stream keyed by (world.seed, prompt hash, sample_index).
//
//  * elicitation prompts: every fact whose subject is the anchor (target for
//    Hop0, neighbor for NeighborHop) is recalled with its probability; with
//    hallucination_prob one pool entity is added. Lines are numbered.
//  * extraction prompts: lists the world entities mentioned on each line of
//    the text (an ideal extractor), or NONE.
//  * event prompts: renders the fact linking the two events, else UNKNOWN.
//  * QA prompts: "Question: ... Answer: <target entity>" with the target
//    replaced by "which entity" in the question.
// Anything else throws kUnrecognizedPrompt.
class OracleResponder final : public Responder {
 public:
  explicit OracleResponder(OracleWorld world);
  std::string complete(const std::string& prompt, int sample_index) override;
  const OracleWorld& world() const { return world_; }

 private:
  OracleWorld world_;
  std::map<EntityId, std::string> entities_;
};

// P(Binomial(n, p) >= k), summed exactly term by term.
double binomial_tail(int n, double p, int k);

// Smallest number of hits k with k/N >= tau under the same floating-point
// comparison the miner uses.
int min_hits(int N, double tau);

// Retention probability above which expected_graph keeps a candidate.
inline constexpr double kExpectedRetentionBar = 0.999;

// Analytic counterpart of mine_graph on an oracle world: per-response
// inclusion probabilities are computed exactly, candidates whose retention
// probability exceeds kExpectedRetentionBar become nodes, and edges carry
// expected counts (exact under deterministic recall). Expansion order,
// budget and adaptive stopping mirror the miner.
MemoryGraph expected_graph(const OracleWorld& world, const MiningConfig& config,
                           std::string_view target);

}  // namespace memmine
