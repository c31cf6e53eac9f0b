// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/textmetrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "testing/oracles.hpp"
#include "topicsum/error.hpp"
#include "topicsum/tokenizer.hpp"

namespace topicsum::textmetrics {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(tokenize("The cat, sat."), (Tokens{"the", "cat", "sat"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("A\xE2\x80\x94" "B"), (Tokens{"a", "b"}));
}

TEST(Tokenize, KeepsNonAsciiLetters) {
  EXPECT_EQ(tokenize("Caf\xC3\xA9 \xC3\x89T\xC3\x89"), (Tokens{"caf\xC3\xA9", "\xC3\xA9t\xC3\xA9"}));
  EXPECT_EQ(tokenize("x\xE3\x80\x82y"), (Tokens{"x", "y"}));  // ideographic full stop
}

TEST(RougeN, IdentityIsOne) {
  const Tokens t = {"a", "b", "c"};
  EXPECT_DOUBLE_EQ(rouge_n(t, t, 1), 1.0);
  EXPECT_DOUBLE_EQ(rouge_n(t, t, 2), 1.0);
}

TEST(RougeN, HandCountedFixture) {
  const Tokens cand = {"the", "cat"};
  const Tokens ref = {"the", "cat", "sat"};
  EXPECT_DOUBLE_EQ(rouge_n(cand, ref, 1), 0.8);
}

TEST(RougeN, ClipsRepeatedMatches) {
  const Tokens cand = {"the", "the", "the"};
  const Tokens ref = {"the", "cat"};
  // 1 clipped match: p = 1/3, r = 1/2.
  EXPECT_NEAR(rouge_n(cand, ref, 1), 0.4, 1e-15);
}

TEST(RougeN, DisjointAndEmpty) {
  EXPECT_EQ(rouge_n(Tokens{"a", "b"}, Tokens{"c", "d"}, 2), 0.0);
  EXPECT_EQ(rouge_n(Tokens{"a"}, Tokens{"a"}, 2), 0.0);  // no bigrams
  EXPECT_EQ(rouge_n(Tokens{}, Tokens{"a"}, 1), 0.0);
}

TEST(RougeN, RejectsOrderZero) {
  EXPECT_THROW(rouge_n(Tokens{"a"}, Tokens{"a"}, 0), Error);
}

TEST(RougeL, Fixtures) {
  EXPECT_DOUBLE_EQ(rouge_l(Tokens{"a", "b", "c", "d"}, Tokens{"a", "c", "b", "d"}), 0.75);
  EXPECT_DOUBLE_EQ(rouge_l(Tokens{"x", "y"}, Tokens{"x", "y"}), 1.0);
  EXPECT_EQ(rouge_l(Tokens{}, Tokens{"x"}), 0.0);
}

TEST(RougeL, MatchesExhaustiveOracleOnRandomShortPairs) {
  testing::Gen gen(17);
  const Tokens alphabet = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    Tokens a(gen.range(0, 8));
    Tokens b(gen.range(0, 8));
    for (auto& t : a) t = alphabet[gen.range(0, 3)];
    for (auto& t : b) t = alphabet[gen.range(0, 3)];
    EXPECT_EQ(lcs_length(a, b), testing::exhaustive_lcs(a, b));
  }
}

TEST(RougeProperties, F1IsSymmetric) {
  testing::Gen gen(5);
  const Tokens alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    Tokens a(gen.range(1, 9));
    Tokens b(gen.range(1, 9));
    for (auto& t : a) t = alphabet[gen.range(0, 2)];
    for (auto& t : b) t = alphabet[gen.range(0, 2)];
    EXPECT_NEAR(rouge_n(a, b, 1), rouge_n(b, a, 1), 1e-15);
    EXPECT_NEAR(rouge_n(a, b, 2), rouge_n(b, a, 2), 1e-15);
    EXPECT_NEAR(rouge_l(a, b), rouge_l(b, a), 1e-15);
  }
}

TEST(RougeProperties, AppendingReferenceNgramNeverLowersMatches) {
  // With the clipped count recovered as F1 * (|c| + |r|) / 2.
  testing::Gen gen(8);
  const Tokens alphabet = {"a", "b", "c"};
  auto matches = [](const Tokens& c, const Tokens& r) {
    return rouge_n(c, r, 1) * static_cast<double>(c.size() + r.size()) / 2.0;
  };
  for (int trial = 0; trial < 200; ++trial) {
    Tokens c(gen.range(1, 6));
    Tokens r(gen.range(1, 6));
    for (auto& t : c) t = alphabet[gen.range(0, 2)];
    for (auto& t : r) t = alphabet[gen.range(0, 2)];
    const double before = matches(c, r);
    auto extended = c;
    extended.push_back(r[gen.range(0, r.size() - 1)]);
    EXPECT_GE(matches(extended, r) + 1e-9, before);
  }
}

TEST(GeometricMean, ConstructedFixture) {
  EXPECT_NEAR(geometric_mean(0.4, 0.1, 0.2), 0.2, 1e-12);
  EXPECT_EQ(geometric_mean(0.5, 0.0, 0.5), 0.0);
}

TEST(RougeReward, IdentityZeroAndMissingReference) {
  EXPECT_DOUBLE_EQ(rouge_reward("the cat sat", "the cat sat"), 1.0);
  // Shared unigrams, no shared bigram.
  EXPECT_EQ(rouge_reward("cat the", "the cat"), 0.0);
  EXPECT_THROW(rouge_reward("x", "   "), Error);
}

TEST(RougeScores, ReportsAllFour) {
  const auto s = rouge_scores("the cat sat on the mat", "the cat lay on the mat");
  // Unigrams: 5 of 6 match each way; bigrams: the-cat, on-the, the-mat = 3 of 5.
  EXPECT_NEAR(s.r1, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.r2, 0.6, 1e-15);
  EXPECT_NEAR(s.rl, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.rm, std::cbrt(s.r1 * s.r2 * s.rl), 1e-15);
}

TEST(Tokenizer, CountsAndRegistry) {
  EXPECT_EQ(whitespace_count("  a b\tc\n"), 3u);
  EXPECT_EQ(whitespace_count(""), 0u);
  EXPECT_EQ(sentence_count("One. Two! Three? four"), 4u);
  EXPECT_EQ(sentence_count("..."), 0u);
  EXPECT_EQ(count_tokens("a, b", kWordTokenizer), 2u);
  EXPECT_EQ(count_tokens("a , b"), 3u);
  EXPECT_FALSE(has_tokenizer("chars"));
  register_tokenizer("chars", [](std::string_view t) { return t.size(); });
  EXPECT_TRUE(has_tokenizer("chars"));
  EXPECT_EQ(count_tokens("abcd", "chars"), 4u);
  EXPECT_THROW(count_tokens("a", "unknown-tokenizer"), Error);
}

}  // namespace
}  // namespace topicsum::textmetrics
