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
#include <set>

#include "memmine/entity.hpp"
#include "memmine/error.hpp"
#include "memmine/parallel.hpp"
#include "memmine/rng.hpp"
#include "test_util.hpp"

namespace memmine {
namespace {

TEST(NormalizeMention, CollapsesWhitespaceAndCase) {
  EXPECT_EQ(normalize_mention("  Taylor  Swift ").key(), "taylor swift");
}

TEST(NormalizeMention, AlreadyNormalIsUnchanged) {
  EXPECT_EQ(normalize_mention("taylor swift").key(), "taylor swift");
}

TEST(NormalizeMention, PunctuationOnlyIsEmpty) {
  EXPECT_ERRC(normalize_mention("!!!"), Errc::kEmptyMention);
  EXPECT_ERRC(normalize_mention("   "), Errc::kEmptyMention);
}

TEST(NormalizeMention, StripsEdgePunctuationOnly) {
  EXPECT_EQ(normalize_mention("\"Blank Space.\"").key(), "blank space");
  EXPECT_EQ(normalize_mention("AC/DC").key(), "ac/dc");
}

TEST(NormalizeMention, IdempotentOnRandomStrings) {
  std::mt19937_64 gen(42);
  const std::string alphabet = "aZ .,!?\t\n-'\"xyQ09";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const int len = static_cast<int>(gen() % 16);
    for (int i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once) << "input: " << s;
    if (!once.empty()) {
      EXPECT_EQ(EntityId::from_key(once).key(), once);
    }
  }
}

TEST(EntityId, FromKeyRejectsUnnormalized) {
  EXPECT_ERRC(EntityId::from_key("Taylor Swift"), Errc::kInvalidArgument);
  EXPECT_ERRC(EntityId::from_key(""), Errc::kInvalidArgument);
}

TEST(Mentions, WordBoundedCaseInsensitive) {
  EXPECT_TRUE(mentions("I love Blank Space.", "blank space"));
  EXPECT_FALSE(mentions("Swiftly done", "swift"));
  EXPECT_TRUE(mentions("Released in 2014!", "2014"));
  EXPECT_FALSE(mentions("", "x"));
}

TEST(Utf8Length, CountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("Beyonc\xc3\xa9"), 7u);
  EXPECT_EQ(utf8_length("\xe2\x82\xac"), 1u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(5), b(5), c(6);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowCoversRange) {
  Rng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = r.below(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, DeriveSeedSeparatesKeys) {
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_EQ(derive_seed(9, 8, 7), derive_seed(9, 8, 7));
}

TEST(Fnv1a, KnownVectors) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(257, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw Error(Errc::kDeadEnd, std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.detail(), "7");
  }
}

TEST(Error, MessageCarriesName) {
  const Error e(Errc::kSchemaError, "target");
  EXPECT_STREQ(e.what(), "SchemaError: target");
  EXPECT_EQ(e.detail(), "target");
}

}  // namespace
}  // namespace memmine
