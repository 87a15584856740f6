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

#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "memmine/memgraph.hpp"
#include "test_util.hpp"

namespace memmine {
namespace {

using testing::id;
using testing::make_graph;

MemoryGraph swift() { return MemoryGraph(id("Taylor Swift"), "Taylor Swift"); }

TEST(UpsertNode, TargetOnlyGraphHasOneNode) {
  const MemoryGraph g = swift();
  EXPECT_EQ(g.nodes().size(), 1u);
  EXPECT_EQ(g.target_node().hop, 0);
  EXPECT_DOUBLE_EQ(g.target_node().strength, 1.0);
}

TEST(UpsertNode, MergeGrowsSurfaceFormsOnly) {
  MemoryGraph g = swift();
  g.upsert_node(MemoryNode{id("Blank Space"), {"Blank Space"}, 0.5, 1, g.target()});
  g = upsert_node(g, MemoryNode{id("blank space"), {"blank space"}, 0.6, 1, g.target()});
  EXPECT_EQ(g.nodes().size(), 2u);
  const auto& n = g.node(id("blank space"));
  EXPECT_EQ(n.surface_forms.size(), 2u);
  EXPECT_DOUBLE_EQ(n.strength, 0.6);
}

TEST(UpsertNode, HopTwoWithoutParentIsOrphan) {
  MemoryGraph g = swift();
  EXPECT_ERRC(g.upsert_node(MemoryNode{id("x"), {"x"}, 0.5, 2, std::nullopt}),
              Errc::kOrphanNode);
}

TEST(UpsertNode, RejectsBadStrengthAndSecondHopZero) {
  MemoryGraph g = swift();
  EXPECT_ERRC(g.upsert_node(MemoryNode{id("x"), {"x"}, 1.5, 1, g.target()}),
              Errc::kInvalidArgument);
  EXPECT_ERRC(g.upsert_node(MemoryNode{id("x"), {"x"}, 0.5, 0, std::nullopt}),
              Errc::kInvalidArgument);
}

TEST(PutEdge, RejectsSelfLoopsAndUnknownEndpoints) {
  MemoryGraph g = swift();
  EXPECT_ERRC(g.put_edge(MemoryEdge{g.target(), g.target(), 1, 1.0}),
              Errc::kInvalidArgument);
  EXPECT_ERRC(g.put_edge(MemoryEdge{g.target(), id("nope"), 1, 1.0}),
              Errc::kInvalidArgument);
  g.upsert_node(MemoryNode{id("a"), {"a"}, 0.5, 1, g.target()});
  EXPECT_ERRC(g.put_edge(MemoryEdge{g.target(), id("a"), 0, 1.0}), Errc::kInvalidArgument);
  EXPECT_ERRC(g.put_edge(MemoryEdge{g.target(), id("a"), 1, 0.0}), Errc::kInvalidArgument);
}

TEST(EdgeWeights, EqualCounts) {
  const auto w = edge_weights({{id("a"), 2}, {id("b"), 2}});
  EXPECT_DOUBLE_EQ(w.at(id("a")), 0.5);
  EXPECT_DOUBLE_EQ(w.at(id("b")), 0.5);
}

TEST(EdgeWeights, DirectArithmetic) {
  const auto w = edge_weights({{id("a"), 3}, {id("b"), 1}});
  EXPECT_DOUBLE_EQ(w.at(id("a")), 0.75);
  EXPECT_DOUBLE_EQ(w.at(id("b")), 0.25);
}

TEST(EdgeWeights, SingleNeighbor) {
  EXPECT_DOUBLE_EQ(edge_weights({{id("a"), 7}}).at(id("a")), 1.0);
}

TEST(EdgeWeights, EmptyAndNonPositive) {
  EXPECT_ERRC(edge_weights({}), Errc::kEmptyNeighborhood);
  EXPECT_ERRC(edge_weights({{id("a"), 0}}), Errc::kInvalidArgument);
}

TEST(EdgeWeights, SumToOneOnRandomCounts) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<EntityId, int> counts;
    const int n = 1 + static_cast<int>(gen() % 12);
    for (int i = 0; i < n; ++i) {
      counts[id("e" + std::to_string(i))] = 1 + static_cast<int>(gen() % 50);
    }
    double sum = 0.0;
    for (const auto& [k, w] : edge_weights(counts)) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Serialize, TargetOnlyRoundTrips) {
  const MemoryGraph g = swift();
  const std::string bytes = serialize_graph(g);
  EXPECT_EQ(deserialize_graph(bytes), g);
  EXPECT_EQ(bytes.back(), '\n');
}

TEST(Serialize, TwoNodesRoundTripAndAreDeterministic) {
  MemoryGraph g = swift();
  g.upsert_node(MemoryNode{id("Blank Space"), {"Blank Space"}, 0.7, 1, g.target()});
  g.put_edge(MemoryEdge{g.target(), id("blank space"), 7, 0.7});
  g.mutable_budget().iterations = 1;
  g.mutable_budget().queries_issued = 10;
  g.mutable_budget().queries_per_iteration = 10;
  const std::string a = serialize_graph(g);
  EXPECT_EQ(a, serialize_graph(g));
  const MemoryGraph back = deserialize_graph(a);
  EXPECT_EQ(back, g);
  EXPECT_EQ(serialize_graph(back), a);
}

TEST(Serialize, MissingTargetIsSchemaError) {
  auto j = nlohmann::json::parse(serialize_graph(swift()));
  j.erase("target");
  try {
    deserialize_graph(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSchemaError);
    EXPECT_EQ(e.detail(), "target");
  }
}

TEST(Serialize, WrongFieldTypeNamesPath) {
  MemoryGraph g = swift();
  g.upsert_node(MemoryNode{id("a"), {"a"}, 0.7, 1, g.target()});
  auto j = nlohmann::json::parse(serialize_graph(g));
  j["nodes"][1]["strength"] = "high";
  try {
    deserialize_graph(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSchemaError);
    EXPECT_EQ(e.detail(), "nodes[1].strength");
  }
}

TEST(Serialize, InvariantBreakIsReported) {
  MemoryGraph g = swift();
  g.upsert_node(MemoryNode{id("a"), {"a"}, 0.7, 1, g.target()});
  g.put_edge(MemoryEdge{g.target(), id("a"), 1, 1.0});
  auto j = nlohmann::json::parse(serialize_graph(g));
  for (auto& n : j["nodes"]) {
    if (n["id"] == "a") n["strength"] = 0.05;  // below tau = 0.2
  }
  EXPECT_ERRC(deserialize_graph(j.dump()), Errc::kInvariantViolation);
  EXPECT_ERRC(deserialize_graph("{not json"), Errc::kSchemaError);
}

TEST(Validate, OutWeightAboveOneFails) {
  MemoryGraph g = make_graph("t", {{"t", "a", 0.6}, {"t", "b", 0.5}});
  EXPECT_ERRC(g.validate(), Errc::kInvariantViolation);
}

TEST(Validate, UnreachableWithinKFails) {
  // Chain t->a->b->c is fine at K=3 but not at K=2.
  auto g = make_graph("t", {{"t", "a", 1.0}, {"a", "b", 1.0}, {"b", "c", 1.0}}, 3);
  EXPECT_NO_THROW(g.validate());
  EXPECT_ERRC(make_graph("t", {{"t", "a", 1.0}, {"a", "b", 1.0}, {"b", "c", 1.0}}, 2).validate(),
              Errc::kInvariantViolation);
}

TEST(Validate, BudgetBoundChecked) {
  MemoryGraph g = swift();
  g.mutable_budget().iterations = 1;
  g.mutable_budget().queries_issued = 11;  // N = 10
  EXPECT_ERRC(g.validate(), Errc::kInvariantViolation);
}

TEST(BfsDistances, ChainHops) {
  const auto g = make_graph("t", {{"t", "a", 1.0}, {"a", "b", 1.0}});
  const auto d = g.bfs_distances();
  EXPECT_EQ(d.at(id("t")), 0);
  EXPECT_EQ(d.at(id("a")), 1);
  EXPECT_EQ(d.at(id("b")), 2);
}

TEST(OutEdges, OnlyFromRequestedSource) {
  const auto g = make_graph("t", {{"t", "a", 0.5}, {"t", "b", 0.5}, {"a", "b", 1.0}});
  EXPECT_EQ(g.out_edges(id("t")).size(), 2u);
  EXPECT_EQ(g.out_edges(id("a")).size(), 1u);
  EXPECT_EQ(g.out_edges(id("b")).size(), 0u);
  EXPECT_FALSE(g.weight(id("b"), id("a")).has_value());
  EXPECT_DOUBLE_EQ(*g.weight(id("a"), id("b")), 1.0);
}

TEST(MiningConfig, ProfilesAndValidation) {
  EXPECT_EQ(MiningConfig::rich_profile().tau, 0.2);
  EXPECT_EQ(MiningConfig::sparse_profile().tau, 0.3);
  EXPECT_EQ(MiningConfig::sparse_profile().K, 3);
  MiningConfig c;
  c.N = 0;
  EXPECT_ERRC(c.validate(), Errc::kInvalidArgument);
  c = {};
  c.tau = 1.5;
  EXPECT_ERRC(c.validate(), Errc::kInvalidArgument);
}

}  // namespace
}  // namespace memmine
