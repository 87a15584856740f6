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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memmine/entity.hpp"
#include "memmine/memgraph.hpp"

namespace memmine {

enum class PathKind { kForget, kNeighbor };

std::string_view path_kind_name(PathKind kind);  // "forget" / "neighbor"
PathKind parse_path_kind(std::string_view name);  // kSchemaError otherwise

// When visit counts move: after every accepted step, or once per finished
// walk.
enum class VisitUpdate { kPerStep, kBetweenWalks };

struct SamplingConfig {
  int R = 200;          // walks per batch
  int L = 5;            // max walk length in nodes
  double alpha = 1.0;   // exploration coefficient
  double eta = 0.3;     // path-quality threshold (inclusive)
  std::optional<double> coverage_target;
  std::uint64_t seed = 0;
  VisitUpdate visit_update = VisitUpdate::kPerStep;
  int neighbor_top_k = 0;  // neighbor-walk start pool; 0 = all out-neighbors

  static SamplingConfig rich_profile() { return {}; }
  static SamplingConfig sparse_profile() {
    SamplingConfig c;
    c.R = 20;
    return c;
  }

  // Throws kInvalidArgument on R < 1, L < 2, alpha < 0, eta outside [0,1],
  // coverage_target outside (0,1].
  void validate() const;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct MemoryPath {
  std::vector<EntityId> nodes;
  double quality = 0.0;
  PathKind kind = PathKind::kForget;

  friend bool operator==(const MemoryPath&, const MemoryPath&) = default;
};

class VisitLedger {
 public:
  int visits(const EntityId& id) const {
    auto it = counts_.find(id);
    return it == counts_.end() ? 0 : it->second;
  }
  void bump(const EntityId& id) { ++counts_[id]; }
  const std::map<EntityId, int>& counts() const { return counts_; }

 private:
  std::map<EntityId, int> counts_;
};

// Normalized p(v|u) proportional to w(u,v) * (1/(1+vis(v)))^alpha over the
// stored out-edges of u, optionally with one node excluded. Throws kDeadEnd
// when no candidate remains.
std::map<EntityId, double> transition_distribution(
    const MemoryGraph& graph, const EntityId& u, const VisitLedger& ledger,
    double alpha, const std::optional<EntityId>& exclude = std::nullopt);

// Mean edge weight along `nodes`. kTooShort below 2 nodes, kNotAPath on a
// missing edge.
double path_quality(const MemoryGraph& graph, const std::vector<EntityId>& nodes);

// Fraction of non-target nodes lying on at least one forget path; 1.0 for a
// graph with no non-target nodes.
double coverage(const MemoryGraph& graph, const std::vector<MemoryPath>& paths);

// One accepted step as seen by an audit hook: the distribution that was
// sampled and the visit counts it was computed from.
struct StepAudit {
  EntityId from;
  EntityId chosen;
  std::map<EntityId, double> distribution;
  std::map<EntityId, int> visits;  // for every candidate in `distribution`
  double alpha = 0.0;
};
using StepObserver = std::function<void(const StepAudit&)>;

struct SamplingResult {
  std::vector<MemoryPath> paths;        // retained, in walk order
  int walks_run = 0;
  int discarded_short = 0;
  int discarded_quality = 0;
  std::vector<double> coverage_by_batch;
  bool coverage_capped = false;  // coverage_target set but unmet at 10R
  VisitLedger ledger;

  double final_coverage() const {
    return coverage_by_batch.empty() ? 0.0 : coverage_by_batch.back();
  }
};

// Exploratory walks from the target. Walks stop at L nodes or a dead end;
// single-node walks and paths with quality < eta are dropped. With a
// coverage target, further batches of R walks run until it is met or 10R
// walks have been made. Throws kIsolatedTarget if the target has no
// out-edges.
SamplingResult sample_paths(const MemoryGraph& graph, const SamplingConfig& config,
                            const StepObserver& observer = nullptr);

// Walks that start at the target's strongest out-neighbors (round-robin,
// strength desc then id) and never enter the target. Uses its own ledger
// and RNG stream. Throws kNoNeighbors.
SamplingResult sample_neighbor_paths(const MemoryGraph& graph,
                                     const SamplingConfig& config,
                                     const StepObserver& observer = nullptr);

// Checks path invariants against `graph`; throws kInvariantViolation.
void validate_path(const MemoryGraph& graph, const MemoryPath& path, double eta);

// JSONL, one {"kind","nodes","quality"} object per line.
std::string paths_to_jsonl(const std::vector<MemoryPath>& paths);
std::vector<MemoryPath> paths_from_jsonl(std::string_view text);

}  // namespace memmine
