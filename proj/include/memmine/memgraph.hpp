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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memmine/entity.hpp"

namespace memmine {

/// Knobs of the elicitation/expansion stage.
///
/// Defaults follow the rich-knowledge profile (N=10, tau=0.2, K=2); the
/// sparse profile uses tau=0.3, K=3 (see `sparse_profile`).
struct MiningConfig {
  int N = 10;                  // elicitations per anchor
  double tau = 0.2;            // retention threshold on strength
  int K = 2;                   // max hops
  std::optional<double> adaptive_stop_threshold;
  int max_iterations = 1000;   // anchor-expansion budget
  std::uint64_t seed = 0;
  bool heuristic_extraction = false;

  static MiningConfig rich_profile() { return {}; }
  static MiningConfig sparse_profile() {
    MiningConfig c;
    c.tau = 0.3;
    c.K = 3;
    return c;
  }

  // Throws Error(kInvalidArgument) when a field is out of range.
  void validate() const;

  friend bool operator==(const MiningConfig&, const MiningConfig&) = default;
};

struct BudgetReport {
  int iterations = 0;            // anchors actually expanded
  int queries_issued = 0;        // elicitation completions
  int queries_per_iteration = 0; // N
  int extraction_queries = 0;    // responder-assisted extraction calls
  bool truncated = false;        // an anchor was skipped for budget

  friend bool operator==(const BudgetReport&, const BudgetReport&) = default;
};

struct MemoryNode {
  EntityId id;
  std::set<std::string> surface_forms;
  double strength = 0.0;
  int hop = 0;
  std::optional<EntityId> discovered_from;

  friend bool operator==(const MemoryNode&, const MemoryNode&) = default;
};

struct MemoryEdge {
  EntityId src;
  EntityId dst;
  int count = 1;
  double weight = 1.0;

  friend bool operator==(const MemoryEdge&, const MemoryEdge&) = default;
};

using EdgeKey = std::pair<EntityId, EntityId>;

// Orders edge keys by (src, dst) and also allows lookup by src alone.
struct EdgeKeyLess {
  using is_transparent = void;
  bool operator()(const EdgeKey& a, const EdgeKey& b) const { return a < b; }
  bool operator()(const EdgeKey& a, const EntityId& src) const {
    return a.first < src;
  }
  bool operator()(const EntityId& src, const EdgeKey& b) const {
    return src < b.first;
  }
};

using EdgeMap = std::map<EdgeKey, MemoryEdge, EdgeKeyLess>;

// Target-rooted weighted local memory graph. Nodes and edges are kept in
// ordered maps so iteration (and therefore serialization) is deterministic.
class MemoryGraph {
 public:
  MemoryGraph(EntityId target, std::string target_surface,
              std::optional<std::string> description = std::nullopt,
              MiningConfig config = {});

  const EntityId& target() const noexcept { return target_; }
  const std::optional<std::string>& description() const noexcept {
    return description_;
  }
  const std::map<EntityId, MemoryNode>& nodes() const noexcept {
    return nodes_;
  }
  const EdgeMap& edges() const noexcept {
    return edges_;
  }
  const MiningConfig& config() const noexcept { return config_; }
  const BudgetReport& budget() const noexcept { return budget_; }
  BudgetReport& mutable_budget() noexcept { return budget_; }

  bool contains(const EntityId& id) const { return nodes_.contains(id); }
  const MemoryNode& node(const EntityId& id) const;
  const MemoryNode& target_node() const { return node(target_); }

  // Inserts or merges a node. On merge surface forms are unioned and strength
  // replaced; hop and discovered_from keep their first values.
  // Throws kOrphanNode when hop > 0 and no node at hop-1 exists (or the named
  // discovered_from is absent or not at hop-1), kInvalidArgument when
  // strength is outside [0,1] or hop 0 is claimed by a non-target id.
  void upsert_node(MemoryNode node);

  // Adds or replaces edge src->dst. Throws kInvalidArgument for self loops,
  // missing endpoints, count < 1 or weight outside (0,1].
  void put_edge(MemoryEdge edge);

  std::vector<const MemoryEdge*> out_edges(const EntityId& src) const;
  std::optional<double> weight(const EntityId& src, const EntityId& dst) const;

  // Hop distance from the target along stored edges; absent when unreachable.
  std::map<EntityId, int> bfs_distances() const;

  // Checks every type invariant; throws Error(kInvariantViolation) naming the
  // first one broken.
  void validate() const;

  friend bool operator==(const MemoryGraph&, const MemoryGraph&) = default;

 private:
  EntityId target_;
  std::optional<std::string> description_;
  std::map<EntityId, MemoryNode> nodes_;
  EdgeMap edges_;
  MiningConfig config_;
  BudgetReport budget_;
};

// Free function form of MemoryGraph::upsert_node.
MemoryGraph upsert_node(MemoryGraph graph, MemoryNode node);

// c(u,v) / sum_v' c(u,v') over the full extraction-count map of one anchor.
// Throws kEmptyNeighborhood on an empty map, kInvalidArgument on counts < 1.
std::map<EntityId, double> edge_weights(
    const std::map<EntityId, int>& extraction_counts);

std::string serialize_graph(const MemoryGraph& graph);

// Throws kSchemaError("<field path>") on malformed input and
// kInvariantViolation when the decoded graph breaks an invariant.
MemoryGraph deserialize_graph(std::string_view bytes);

}  // namespace memmine
