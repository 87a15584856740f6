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

#include "memmine/sampler.hpp"
#include "test_util.hpp"

namespace memmine {
namespace {

using testing::id;
using testing::make_graph;

TEST(TransitionDistribution, AlphaZeroIgnoresVisits) {
  const auto g = make_graph("t", {{"t", "a", 0.75}, {"t", "b", 0.25}});
  VisitLedger ledger;
  for (int i = 0; i < 5; ++i) ledger.bump(id("a"));
  const auto d = transition_distribution(g, id("t"), ledger, 0.0);
  EXPECT_DOUBLE_EQ(d.at(id("a")), 0.75);
  EXPECT_DOUBLE_EQ(d.at(id("b")), 0.25);
}

TEST(TransitionDistribution, AlphaOneHandArithmetic) {
  const auto g = make_graph("t", {{"t", "a", 0.5}, {"t", "b", 0.5}});
  VisitLedger ledger;
  ledger.bump(id("b"));
  const auto d = transition_distribution(g, id("t"), ledger, 1.0);
  EXPECT_DOUBLE_EQ(d.at(id("a")), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(d.at(id("b")), 1.0 / 3.0);
}

TEST(TransitionDistribution, DeadEnds) {
  const auto g = make_graph("t", {{"t", "a", 1.0}});
  EXPECT_ERRC(transition_distribution(g, id("a"), VisitLedger{}, 1.0), Errc::kDeadEnd);
  EXPECT_ERRC(transition_distribution(g, id("t"), VisitLedger{}, 1.0, id("a")),
              Errc::kDeadEnd);
}

MemoryGraph random_graph(std::mt19937_64& gen, int n) {
  std::vector<testing::WeightedEdge> edges;
  for (int u = 0; u < n; ++u) {
    std::vector<int> targets;
    for (int v = 1; v < n; ++v) {
      if (v != u && (gen() % 3 == 0 || v == u + 1)) targets.push_back(v);
    }
    if (targets.empty()) continue;
    std::vector<double> raw;
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      raw.push_back(1.0 + static_cast<double>(gen() % 9));
      total += raw.back();
    }
    // Leave some mass for unretained neighbors now and then.
    if (gen() % 2) total += static_cast<double>(gen() % 5);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      edges.push_back({"n" + std::to_string(u), "n" + std::to_string(targets[i]),
                       raw[i] / total});
    }
  }
  return make_graph("n0", edges, 50);
}

TEST(TransitionDistribution, PropertiesOnRandomGraphs) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const MemoryGraph g = random_graph(gen, 3 + static_cast<int>(gen() % 6));
    VisitLedger ledger;
    for (const auto& [k, n] : g.nodes()) {
      for (int i = 0; i < static_cast<int>(gen() % 4); ++i) ledger.bump(k);
    }
    const double alpha = static_cast<double>(gen() % 4) * 0.5;
    for (const auto& [u, node] : g.nodes()) {
      const auto out = g.out_edges(u);
      if (out.empty()) continue;
      const auto d = transition_distribution(g, u, ledger, alpha);
      double sum = 0.0;
      for (const auto& [v, p] : d) {
        EXPECT_TRUE(g.weight(u, v).has_value());
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_EQ(d.size(), out.size());
      if (alpha == 0.0) {
        double wsum = 0.0;
        for (const auto* e : out) wsum += e->weight;
        for (const auto* e : out) EXPECT_NEAR(d.at(e->dst), e->weight / wsum, 1e-15);
      } else if (out.size() > 1) {
        // One more visit to v must strictly lower p(v).
        const EntityId v = out.front()->dst;
        VisitLedger more = ledger;
        more.bump(v);
        EXPECT_LT(transition_distribution(g, u, more, alpha).at(v), d.at(v));
      }
    }
  }
}

TEST(PathQuality, Examples) {
  const auto g = make_graph("t", {{"t", "a", 0.25}});
  EXPECT_DOUBLE_EQ(path_quality(g, {id("t"), id("a")}), 0.25);
  const auto g3 = make_graph("t", {{"t", "a", 0.6}, {"a", "b", 0.2}, {"b", "c", 0.1}});
  EXPECT_DOUBLE_EQ(path_quality(g3, {id("t"), id("a"), id("b"), id("c")}), 0.3);
  EXPECT_ERRC(path_quality(g, {id("t")}), Errc::kTooShort);
  EXPECT_ERRC(path_quality(g, {id("a"), id("t")}), Errc::kNotAPath);
}

TEST(SamplePaths, ChainYieldsIdenticalPaths) {
  const auto g = make_graph("t", {{"t", "a", 1.0}});
  SamplingConfig c;
  c.R = 3;
  const auto r = sample_paths(g, c);
  ASSERT_EQ(r.paths.size(), 3u);
  for (const auto& p : r.paths) {
    EXPECT_EQ(p.nodes, (std::vector<EntityId>{id("t"), id("a")}));
    EXPECT_DOUBLE_EQ(p.quality, 1.0);
    EXPECT_EQ(p.kind, PathKind::kForget);
  }
}

TEST(SamplePaths, BoundaryQualityRetained) {
  const auto g = make_graph("t", {{"t", "a", 0.4}, {"a", "b", 0.2}});
  SamplingConfig c;
  c.R = 5;
  c.L = 3;
  c.eta = 0.3;
  const auto r = sample_paths(g, c);
  ASSERT_EQ(r.paths.size(), 5u);
  EXPECT_NEAR(r.paths[0].quality, 0.3, 1e-15);
  // Exactly at the threshold, bit for bit.
  c.eta = r.paths[0].quality;
  EXPECT_EQ(sample_paths(g, c).paths.size(), 5u);
}

TEST(SamplePaths, LowQualityDiscarded) {
  const auto g = make_graph("t", {{"t", "a", 0.25}});
  SamplingConfig c;
  c.R = 4;
  const auto r = sample_paths(g, c);
  EXPECT_TRUE(r.paths.empty());
  EXPECT_EQ(r.discarded_quality, 4);
}

TEST(SamplePaths, IsolatedTarget) {
  const MemoryGraph g(id("t"), "t");
  EXPECT_ERRC(sample_paths(g, SamplingConfig{}), Errc::kIsolatedTarget);
}

TEST(SamplePaths, DeterministicAndPrefixStable) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const MemoryGraph g = random_graph(gen, 6);
    SamplingConfig c;
    c.eta = 0.0;
    c.seed = gen();
    c.R = 40;
    const auto a = sample_paths(g, c);
    EXPECT_EQ(paths_to_jsonl(a.paths), paths_to_jsonl(sample_paths(g, c).paths));
    c.R = 15;
    const auto b = sample_paths(g, c);
    ASSERT_LE(b.paths.size(), a.paths.size());
    for (std::size_t i = 0; i < b.paths.size(); ++i) EXPECT_EQ(b.paths[i], a.paths[i]);
    EXPECT_LE(b.final_coverage(), a.final_coverage());
  }
}

TEST(SamplePaths, CoverageBatchesNondecreasing) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const MemoryGraph g = random_graph(gen, 9);
    SamplingConfig c;
    c.R = 3;
    c.eta = 0.0;
    c.coverage_target = 1.0;
    c.seed = gen();
    const auto r = sample_paths(g, c);
    for (std::size_t i = 1; i < r.coverage_by_batch.size(); ++i) {
      EXPECT_GE(r.coverage_by_batch[i], r.coverage_by_batch[i - 1]);
    }
    EXPECT_TRUE(r.final_coverage() >= 1.0 || r.coverage_capped);
    EXPECT_LE(r.walks_run, 10 * c.R);
  }
}

TEST(SamplePaths, ObserverSeesPenaltyInputs) {
  const auto g = make_graph("t", {{"t", "a", 0.5}, {"t", "b", 0.5}, {"a", "b", 1.0}});
  SamplingConfig c;
  c.R = 50;
  int steps = 0;
  sample_paths(g, c, [&](const StepAudit& s) {
    ++steps;
    EXPECT_EQ(s.distribution.size(), s.visits.size());
    EXPECT_TRUE(s.distribution.count(s.chosen));
  });
  EXPECT_GT(steps, 50);
}

TEST(NeighborPaths, TargetExcluded) {
  const auto g = make_graph("t", {{"t", "a", 1.0}, {"a", "b", 0.5}, {"a", "t", 0.5}});
  SamplingConfig c;
  c.R = 10;
  c.eta = 0.0;
  const auto r = sample_neighbor_paths(g, c);
  ASSERT_EQ(r.paths.size(), 10u);
  for (const auto& p : r.paths) {
    EXPECT_EQ(p.nodes, (std::vector<EntityId>{id("a"), id("b")}));
    EXPECT_EQ(p.kind, PathKind::kNeighbor);
  }
}

TEST(NeighborPaths, OnlyTargetContinuationIsTooShort) {
  const auto g = make_graph("t", {{"t", "a", 1.0}, {"a", "t", 1.0}});
  SamplingConfig c;
  c.R = 4;
  const auto r = sample_neighbor_paths(g, c);
  EXPECT_TRUE(r.paths.empty());
  EXPECT_EQ(r.discarded_short, 4);
}

TEST(NeighborPaths, RoundRobinStarts) {
  const auto g = make_graph("t", {{"t", "a", 0.3},
                                  {"t", "b", 0.3},
                                  {"t", "c", 0.3},
                                  {"a", "d", 1.0},
                                  {"b", "d", 1.0},
                                  {"c", "d", 1.0}});
  SamplingConfig c;
  c.R = 6;
  c.eta = 0.0;
  const auto r = sample_neighbor_paths(g, c);
  ASSERT_EQ(r.paths.size(), 6u);
  const char* expected[] = {"a", "b", "c", "a", "b", "c"};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(r.paths[i].nodes.front(), id(expected[i]));
}

TEST(NeighborPaths, NoNeighbors) {
  const MemoryGraph g(id("t"), "t");
  EXPECT_ERRC(sample_neighbor_paths(g, SamplingConfig{}), Errc::kNoNeighbors);
}

TEST(Coverage, Examples) {
  std::vector<testing::WeightedEdge> star;
  for (int i = 0; i < 10; ++i) star.push_back({"t", "v" + std::to_string(i), 0.1});
  const auto g = make_graph("t", star);
  std::vector<MemoryPath> paths;
  EXPECT_DOUBLE_EQ(coverage(g, paths), 0.0);
  for (int i = 0; i < 9; ++i) {
    paths.push_back(MemoryPath{{id("t"), id("v" + std::to_string(i))}, 0.1, PathKind::kForget});
  }
  EXPECT_DOUBLE_EQ(coverage(g, paths), 0.9);
  paths.push_back(MemoryPath{{id("t"), id("v9")}, 0.1, PathKind::kForget});
  EXPECT_DOUBLE_EQ(coverage(g, paths), 1.0);
}

TEST(PathsJsonl, RoundTripAndValidation) {
  const auto g = make_graph("t", {{"t", "a", 0.5}, {"a", "b", 1.0}});
  const std::vector<MemoryPath> paths = {
      {{id("t"), id("a"), id("b")}, path_quality(g, {id("t"), id("a"), id("b")}), PathKind::kForget},
      {{id("a"), id("b")}, 1.0, PathKind::kNeighbor}};
  const std::string text = paths_to_jsonl(paths);
  EXPECT_EQ(paths_from_jsonl(text), paths);
  for (const auto& p : paths) EXPECT_NO_THROW(validate_path(g, p, 0.3));
  EXPECT_ERRC(validate_path(g, MemoryPath{{id("a"), id("b")}, 1.0, PathKind::kForget}, 0.3),
              Errc::kInvariantViolation);
  EXPECT_ERRC(validate_path(g, MemoryPath{{id("t"), id("a")}, 0.5, PathKind::kForget}, 0.6),
              Errc::kInvariantViolation);
  EXPECT_ERRC(paths_from_jsonl("{\"kind\":\"sideways\",\"nodes\":[],\"quality\":1}\n"),
              Errc::kSchemaError);
}

TEST(SamplingConfig, Validation) {
  SamplingConfig c;
  c.L = 1;
  EXPECT_ERRC(c.validate(), Errc::kInvalidArgument);
  c = {};
  c.alpha = -1;
  EXPECT_ERRC(c.validate(), Errc::kInvalidArgument);
  c = {};
  c.coverage_target = 0.0;
  EXPECT_ERRC(c.validate(), Errc::kInvalidArgument);
  EXPECT_EQ(SamplingConfig::sparse_profile().R, 20);
}

}  // namespace
}  // namespace memmine
