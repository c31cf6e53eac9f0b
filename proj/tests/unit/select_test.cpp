// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/select.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "testing/fakes.hpp"
#include "testing/oracles.hpp"
#include "topicsum/error.hpp"
#include "topicsum/log.hpp"

namespace topicsum::select {
namespace {

using Strings = std::vector<std::string>;
using Scores = std::vector<std::optional<double>>;

TEST(ArgmaxFirst, Fixtures) {
  EXPECT_EQ(argmax_first(Scores{0.4}), 0u);
  EXPECT_EQ(argmax_first(Scores{0.3, 0.7, 0.5}), 1u);
  EXPECT_EQ(argmax_first(Scores{0.5, 0.5}), 0u);
  EXPECT_EQ(argmax_first(Scores{std::nullopt, 0.1, std::nullopt}), 1u);
  EXPECT_FALSE(argmax_first(Scores{std::nullopt}).has_value());
}

class BestOfNTest : public ::testing::Test {
 protected:
  void SetUp() override {
    extractor = std::make_shared<testing::ScriptedExtractor>();
    provider = std::make_shared<testing::TableProvider>();
    provider->table = {{"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}};
    // Against doc topics {x, y, z}: one match gives 0.5, two give 0.8.
    extractor->topics = {{"one", {"x", "x"}}, {"two", {"x", "y"}}, {"other", {"z", "z"}}};
    set = {"r", {"doc"}, std::nullopt, std::vector<TopicList>{TopicList{{"x", "y", "z"}}}};
    rewards::ScorerConfig cfg;
    cfg.preset = rewards::preset("topic");
    cfg.summary_topic_count = 2;
    cfg.sigmas = {{rewards::RewardKind::kTopic, 0.1}};
    scorer = std::make_unique<rewards::RewardScorer>(extractor, provider, cfg);
  }
  std::shared_ptr<testing::ScriptedExtractor> extractor;
  std::shared_ptr<testing::TableProvider> provider;
  corpus::DocumentSet set;
  std::unique_ptr<rewards::RewardScorer> scorer;
};

TEST_F(BestOfNTest, SingleCandidateIsChosen) {
  const auto sel = best_of_n(set, Strings{"one"}, *scorer);
  EXPECT_EQ(sel.winner_index, 0u);
  EXPECT_EQ(sel.winner, "one");
}

TEST_F(BestOfNTest, PicksHighestTopicF1) {
  const auto sel = best_of_n(set, Strings{"one", "two", "other"}, *scorer, SelectMetric::kTopicF1, 3);
  EXPECT_EQ(sel.winner_index, 1u);
  EXPECT_NEAR(sel.winner_score, 0.8, 1e-15);
  EXPECT_NEAR(*sel.scores[0].score, 0.5, 1e-15);
  const auto j = to_json(sel);
  EXPECT_EQ(j.at("summary"), "two");
  EXPECT_EQ(j.at("scores").size(), 3u);
}

TEST_F(BestOfNTest, TieGoesToLowestIndex) {
  const auto sel = best_of_n(set, Strings{"other", "one"}, *scorer);
  EXPECT_EQ(sel.winner_index, 0u);
}

TEST_F(BestOfNTest, FailedCandidatesAreExcluded) {
  extractor->failing.insert("boom");
  std::ostringstream logs;
  log::ScopedSink sink(&logs, log::Level::kWarn);
  const auto sel = best_of_n(set, Strings{"boom", "one"}, *scorer);
  EXPECT_EQ(sel.winner_index, 1u);
  EXPECT_EQ(sel.warnings.size(), 1u);
  EXPECT_FALSE(sel.scores[0].score.has_value());
  try {
    best_of_n(set, Strings{"boom"}, *scorer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSelection);
  }
}

TEST_F(BestOfNTest, Preconditions) {
  EXPECT_THROW(best_of_n(set, Strings{}, *scorer), Error);
  auto bare = set;
  bare.doc_topics.reset();
  EXPECT_THROW(best_of_n(bare, Strings{"one"}, *scorer), Error);
}

TEST_F(BestOfNTest, TotalRewardMetric) {
  const auto sel = best_of_n(set, Strings{"one", "two"}, *scorer, SelectMetric::kTotalReward);
  EXPECT_EQ(sel.winner_index, 1u);
  EXPECT_NEAR(sel.winner_score, 0.8, 1e-15);
}

TEST(BestOfNProperties, DominatesMeanAndIgnoresOrder) {
  auto extractor = std::make_shared<topics::FrequencyExtractor>("english");
  auto provider = std::make_shared<embed::DeterministicProvider>(16);
  rewards::ScorerConfig cfg;
  cfg.preset = rewards::preset("topic");
  cfg.summary_topic_count = 3;
  rewards::RewardScorer scorer(extractor, provider, cfg);
  const Strings vocab = {"ports", "strike", "wages", "council", "budget", "storm", "flood",
                         "school", "teachers", "trade", "tariffs", "harbor", "cranes"};
  testing::Gen gen(55);
  for (int trial = 0; trial < 40; ++trial) {
    corpus::DocumentSet set{"p", {"doc"}, std::nullopt,
                            std::vector<TopicList>{TopicList{{vocab[gen.range(0, 12)],
                                                              vocab[gen.range(0, 12)]}}}};
    Strings cands(gen.range(1, 6));
    for (auto& c : cands) {
      for (int w = 0; w < 4; ++w) c += vocab[gen.range(0, 12)] + " ";
    }
    const auto sel = best_of_n(set, cands, scorer);
    double sum = 0.0;
    for (const auto& s : sel.scores) sum += *s.score;
    EXPECT_GE(sel.winner_score, sum / cands.size() - 1e-15);
    Strings reversed(cands.rbegin(), cands.rend());
    EXPECT_EQ(best_of_n(set, reversed, scorer).winner_score, sel.winner_score);
  }
}

}  // namespace
}  // namespace topicsum::select
