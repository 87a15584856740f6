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

#include <cmath>
#include <random>

#include "memmine/metrics.hpp"
#include "test_util.hpp"

namespace memmine {
namespace {

using testing::id;
using testing::make_graph;

FrequencyDistribution dist(std::initializer_list<std::pair<const char*, double>> items) {
  FrequencyDistribution d;
  for (const auto& [k, v] : items) d[id(k)] = v;
  return d;
}

TEST(Jaccard, WorkedExample) {
  EXPECT_DOUBLE_EQ(jaccard_topk(dist({{"a", 1}, {"b", 1}, {"c", 1}}),
                                dist({{"b", 1}, {"c", 1}, {"d", 1}})),
                   0.5);
}

TEST(Jaccard, TopKCutsByMassThenId) {
  const auto a = dist({{"a", 3}, {"b", 2}, {"c", 2}, {"d", 1}});
  EXPECT_EQ(top_k(a, 2), (std::vector<EntityId>{id("a"), id("b")}));
  EXPECT_DOUBLE_EQ(jaccard_topk(a, dist({{"a", 1}, {"c", 1}}), 2), 1.0 / 3.0);
}

TEST(Jaccard, Errors) {
  EXPECT_ERRC(jaccard_topk({}, dist({{"a", 1}})), Errc::kEmptyInput);
  EXPECT_ERRC(jaccard_topk(dist({{"a", 1}}), {}), Errc::kEmptyInput);
  EXPECT_ERRC(jaccard_topk(dist({{"a", 1}}), dist({{"a", 1}}), 0), Errc::kInvalidArgument);
}

TEST(Cosine, WorkedExample) {
  EXPECT_NEAR(frequency_cosine(dist({{"x", 1}}), dist({{"x", 0.5}, {"y", 0.5}})),
              1.0 / std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(frequency_cosine(dist({{"x", 1}}), dist({{"x", 0.5}, {"y", 0.5}})), 0.7071, 1e-4);
}

TEST(Cosine, DisjointIsZeroAndZeroNormThrows) {
  EXPECT_DOUBLE_EQ(frequency_cosine(dist({{"x", 1}}), dist({{"y", 1}})), 0.0);
  EXPECT_ERRC(frequency_cosine(dist({{"x", 0}}), dist({{"y", 1}})), Errc::kEmptyInput);
  EXPECT_ERRC(frequency_cosine({}, dist({{"y", 1}})), Errc::kEmptyInput);
}

TEST(Metrics, SymmetricAndBoundedOnRandomInputs) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 300; ++trial) {
    FrequencyDistribution a, b;
    for (int i = 0; i < 1 + static_cast<int>(gen() % 20); ++i) {
      a[id("e" + std::to_string(gen() % 30))] = 0.01 + static_cast<double>(gen() % 100);
    }
    for (int i = 0; i < 1 + static_cast<int>(gen() % 20); ++i) {
      b[id("e" + std::to_string(gen() % 30))] = 0.01 + static_cast<double>(gen() % 100);
    }
    const std::size_t k = 1 + gen() % 10;
    const double j = jaccard_topk(a, b, k);
    EXPECT_DOUBLE_EQ(j, jaccard_topk(b, a, k));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    const double c = frequency_cosine(a, b);
    EXPECT_DOUBLE_EQ(c, frequency_cosine(b, a));
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
    EXPECT_DOUBLE_EQ(jaccard_topk(a, a, k), 1.0);
    EXPECT_NEAR(frequency_cosine(a, a), 1.0, 1e-12);
  }
}

TEST(RougeL, WorkedExample) {
  EXPECT_DOUBLE_EQ(rouge_l_recall("Taylor Swift sings pop", "Taylor Swift"), 1.0);
  EXPECT_DOUBLE_EQ(rouge_l_recall("swift taylor", "Taylor Swift"), 0.5);
  EXPECT_DOUBLE_EQ(rouge_l_recall("", "Taylor Swift"), 0.0);
  EXPECT_ERRC(rouge_l_recall("x", "   "), Errc::kEmptyReference);
}

TEST(RougeL, LcsHandValues) {
  EXPECT_EQ(lcs_length(tokenize("a b c d"), tokenize("b d")), 2u);
  EXPECT_EQ(lcs_length(tokenize("a b c"), tokenize("c b a")), 1u);
  EXPECT_EQ(lcs_length({}, tokenize("a")), 0u);
  EXPECT_EQ(tokenize("  Hello\tWORLD \n"), (std::vector<std::string>{"hello", "world"}));
}

TEST(RecoveryFidelity, WorkedExample) {
  auto g = make_graph("t", {{"t", "a", 0.2}, {"t", "b", 0.2}, {"t", "c", 0.2}, {"t", "d", 0.2},
                            {"t", "x", 0.2}});
  const auto r = recovery_fidelity(g, {id("a"), id("b"), id("c"), id("d")});
  EXPECT_DOUBLE_EQ(r.precision, 0.8);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
}

TEST(RecoveryFidelity, EmptyMinedGraph) {
  const MemoryGraph g(id("t"), "t");
  const auto r = recovery_fidelity(g, {id("a"), id("b")});
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.0);
  const auto e = recovery_fidelity(g, std::vector<EntityId>{});
  EXPECT_DOUBLE_EQ(e.recall, 1.0);
}

TEST(RecoveryFidelity, AgainstGraph) {
  const auto mined = make_graph("t", {{"t", "a", 0.5}, {"t", "z", 0.5}});
  const auto truth = make_graph("t", {{"t", "a", 0.5}, {"t", "b", 0.5}});
  const auto r = recovery_fidelity(mined, truth);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
}

TEST(GraphDistribution, NormalizesNonTargetStrengths) {
  auto g = make_graph("t", {{"t", "a", 0.5}, {"t", "b", 0.5}});
  const auto d = graph_distribution(g);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.at(id("a")) + d.at(id("b")), 1.0);
}

TEST(ParseDistribution, BothShapes) {
  const auto a = parse_distribution(R"({"Taylor Swift": 2, "Ed Sheeran": 1})");
  EXPECT_DOUBLE_EQ(a.at(id("taylor swift")), 2.0);
  const auto b = parse_distribution(R"([{"id": "ed sheeran", "mass": 0.5}])");
  EXPECT_DOUBLE_EQ(b.at(id("ed sheeran")), 0.5);
  EXPECT_ERRC(parse_distribution("[1,2]"), Errc::kSchemaError);
}

}  // namespace
}  // namespace memmine
