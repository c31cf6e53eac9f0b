// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/rewards.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "testing/fakes.hpp"
#include "testing/oracles.hpp"
#include "topicsum/error.hpp"
#include "topicsum/log.hpp"

namespace topicsum::rewards {
namespace {

using Strings = std::vector<std::string>;
using embed::EmbeddingVector;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no topicsum::Error thrown";
  return ErrorKind::kIo;
}

TEST(SimilarityMatrix, HandDotProducts) {
  const std::vector<EmbeddingVector> doc = {{{1, 0}}, {{0, 1}}};
  const std::vector<EmbeddingVector> sum = {{{1, 0}}};
  const auto m = similarity_matrix(doc, sum);
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m.cols, 1u);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.0);
  const std::vector<EmbeddingVector> same = {{{0.3, 0.4}}};
  EXPECT_DOUBLE_EQ(similarity_matrix(same, same).at(0, 0), 1.0);
  const std::vector<EmbeddingVector> x = {{{1, 0}}};
  const std::vector<EmbeddingVector> y = {{{0, 1}}};
  EXPECT_DOUBLE_EQ(similarity_matrix(x, y).at(0, 0), 0.0);
}

TEST(SimilarityMatrix, Errors) {
  const std::vector<EmbeddingVector> two = {{{1, 0}}};
  const std::vector<EmbeddingVector> three = {{{1, 0, 0}}};
  EXPECT_EQ(kind_of([&] { similarity_matrix(two, three); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([&] { similarity_matrix(two, {}); }), ErrorKind::kPrecondition);
  EXPECT_EQ(kind_of([] { SimilarityMatrix(2, 2, {1.0}); }), ErrorKind::kShape);
}

TEST(PairScore, Fixtures) {
  const auto m = SimilarityMatrix::from_rows({{1}, {0}});
  const auto s = pair_score(m);
  EXPECT_DOUBLE_EQ(s.coverage, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_NEAR(s.harmonic, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(pair_score(m, TopicMode::kCoverageOnly).harmonic, 0.5);
  EXPECT_DOUBLE_EQ(pair_score(m, TopicMode::kPrecisionOnly).harmonic, 1.0);
  const auto id = pair_score(SimilarityMatrix::from_rows({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(id.coverage, 1.0);
  EXPECT_DOUBLE_EQ(id.precision, 1.0);
  EXPECT_DOUBLE_EQ(id.harmonic, 1.0);
}

TEST(HarmonicMean, ClampsNegativesAndZeroSum) {
  EXPECT_EQ(harmonic_mean(0.0, 0.0), 0.0);
  EXPECT_EQ(harmonic_mean(-0.5, 0.8), 0.0);
  EXPECT_EQ(harmonic_mean(-0.5, -0.2), 0.0);
  EXPECT_NEAR(harmonic_mean(0.75, 1.0), 6.0 / 7.0, 1e-15);
}

TEST(PairScoreProperties, MatchesNaiveLoopsAndDuality) {
  testing::Gen gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = gen.range(1, 6);
    const std::size_t m = gen.range(1, 6);
    testing::Matrix rows(n, std::vector<double>(m));
    double lo = 1.0;
    double hi = -1.0;
    for (auto& r : rows) {
      for (auto& x : r) {
        x = gen.uniform(-1, 1);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    const auto mat = SimilarityMatrix::from_rows(rows);
    const auto s = pair_score(mat);
    EXPECT_EQ(s.coverage, testing::naive_coverage(rows));
    EXPECT_EQ(s.precision, testing::naive_precision(rows));
    EXPECT_EQ(s.coverage, pair_score(mat.transpose()).precision);
    EXPECT_GE(s.coverage, lo);
    EXPECT_LE(s.coverage, hi);
    EXPECT_GE(s.precision, lo);
    EXPECT_LE(s.precision, hi);
  }
}

TEST(PairScoreProperties, PermutationMatrixScoresOne) {
  testing::Gen gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = gen.range(1, 6);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[gen.range(0, i)]);
    testing::Matrix rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) rows[i][perm[i]] = 1.0;
    const auto s = pair_score(SimilarityMatrix::from_rows(rows));
    EXPECT_EQ(s.coverage, 1.0);
    EXPECT_EQ(s.precision, 1.0);
    EXPECT_EQ(s.harmonic, 1.0);
  }
}

class TopicRewardTest : public ::testing::Test {
 protected:
  void SetUp() override {
    provider.table = {{"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}};
  }
  testing::ScriptedExtractor extractor;
  testing::TableProvider provider;
};

TEST_F(TopicRewardTest, IdenticalTopicsGiveOne) {
  corpus::DocumentSet s{"k1", {"document"}, std::nullopt, std::vector<TopicList>{TopicList{{"x", "y"}}}};
  extractor.topics["summary"] = {"x", "y"};
  const auto r = topic_reward(s, "summary", extractor, provider, 2);
  EXPECT_DOUBLE_EQ(r.r_topic, 1.0);
  EXPECT_EQ(provider.calls.load(), 1);  // one batched embedding call
}

TEST_F(TopicRewardTest, MeanOverPairs) {
  // Pair 1: doc {x} vs summary {x}: harmonic 1. Pair 2: doc {x, y} vs {x}:
  // coverage 0.5, precision 1, harmonic 2/3.
  corpus::DocumentSet s{"k2", {"d1", "d2"}, std::nullopt,
                        std::vector<TopicList>{TopicList{{"x"}}, TopicList{{"x", "y"}}}};
  extractor.topics["summary"] = {"x"};
  const auto r = topic_reward(s, "summary", extractor, provider, 1);
  ASSERT_EQ(r.per_pair.size(), 2u);
  EXPECT_DOUBLE_EQ(r.per_pair[0].harmonic, 1.0);
  EXPECT_NEAR(r.per_pair[1].harmonic, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.r_topic, (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST_F(TopicRewardTest, PairHarmonicsOneAndHalfAverageToThreeQuarters) {
  // Second pair: coverage 1/3, precision 1 gives harmonic exactly 0.5.
  corpus::DocumentSet s{"k2", {"d1", "d2"}, std::nullopt,
                        std::vector<TopicList>{TopicList{{"x"}}, TopicList{{"x", "y", "z"}}}};
  extractor.topics["summary"] = {"x"};
  const auto r = topic_reward(s, "summary", extractor, provider, 1);
  EXPECT_NEAR(r.per_pair[1].harmonic, 0.5, 1e-15);
  EXPECT_NEAR(r.r_topic, 0.75, 1e-15);
}

TEST_F(TopicRewardTest, OrthogonalGivesZero) {
  corpus::DocumentSet s{"k1", {"d"}, std::nullopt, std::vector<TopicList>{TopicList{{"x"}}}};
  extractor.topics["summary"] = {"y", "z"};
  const auto r = topic_reward(s, "summary", extractor, provider, 2);
  EXPECT_EQ(r.per_pair[0].coverage, 0.0);
  EXPECT_EQ(r.per_pair[0].precision, 0.0);
  EXPECT_EQ(r.r_topic, 0.0);
}

TEST_F(TopicRewardTest, Errors) {
  corpus::DocumentSet bare{"b", {"d"}, std::nullopt, std::nullopt};
  extractor.topics["summary"] = {"x"};
  EXPECT_EQ(kind_of([&] { topic_reward(bare, "summary", extractor, provider, 1); }),
            ErrorKind::kPrecondition);
  corpus::DocumentSet s{"k1", {"d"}, std::nullopt, std::vector<TopicList>{TopicList{{"x"}}}};
  extractor.failing.insert("bad summary");
  EXPECT_EQ(kind_of([&] { topic_reward(s, "bad summary", extractor, provider, 1); }),
            ErrorKind::kReward);
}

TEST_F(TopicRewardTest, DeterministicProviderSelfSimilarity) {
  embed::DeterministicProvider det(64);
  corpus::DocumentSet s{"k1", {"d"}, std::nullopt,
                        std::vector<TopicList>{TopicList{{"trade deal", "tariffs"}}}};
  extractor.topics["summary"] = {"tariffs", "trade deal"};
  EXPECT_NEAR(topic_reward(s, "summary", extractor, det, 2).r_topic, 1.0, 1e-12);
}

TEST(LengthReward, Fixtures) {
  EXPECT_EQ(length_reward(263, 263), 1.0);
  EXPECT_NEAR(length_reward(200, 100), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(length_reward(0, 100), 0.367879, 1e-6);
  EXPECT_EQ(kind_of([] { length_reward(1, 0); }), ErrorKind::kDomain);
  LengthConfig cfg;
  cfg.expected_tokens = 4;
  EXPECT_EQ(length_reward("one two three four", cfg), 1.0);
  EXPECT_NEAR(length_reward("", cfg), std::exp(-1.0), 1e-15);
}

TEST(ExpectedLength, RoundedMean) {
  auto make = [](std::vector<std::size_t> lens) {
    std::vector<corpus::DocumentSet> out;
    for (auto n : lens) {
      std::string ref;
      for (std::size_t i = 0; i < n; ++i) ref += "w ";
      out.push_back({"id" + std::to_string(out.size()), {"doc"}, ref, std::nullopt});
    }
    return out;
  };
  EXPECT_EQ(estimate_expected_length(make({10, 20})), 15u);
  EXPECT_EQ(estimate_expected_length(make({7})), 7u);
  EXPECT_EQ(estimate_expected_length(make({9, 10, 12})), 10u);
  auto missing = make({5});
  missing[0].reference.reset();
  EXPECT_EQ(kind_of([&] { estimate_expected_length(missing); }), ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { estimate_expected_length(std::vector<corpus::DocumentSet>{}); }),
            ErrorKind::kEmptyInput);
}

TEST(Weights, Fixtures) {
  using enum RewardKind;
  WeightingConfig cfg{{{kTopic, 0.05}, {kLength, 0.1}}, {{kTopic, 2}, {kLength, 1}}};
  const auto w = normalize_weights(cfg);
  EXPECT_NEAR(w.at(kTopic), 0.8, 1e-12);
  EXPECT_NEAR(w.at(kLength), 0.2, 1e-12);

  WeightingConfig equal{{{kTopic, 0.3}, {kLength, 0.3}}, {{kTopic, 1}, {kLength, 1}}};
  EXPECT_NEAR(normalize_weights(equal).at(kTopic), 0.5, 1e-15);

  const auto tr = preset("topic+rouge");
  WeightingConfig both{{{kTopic, 0.2}, {kRouge, 0.2}}, tr.factors};
  const auto wb = normalize_weights(both);
  EXPECT_NEAR(wb.at(kTopic), 0.5, 1e-15);
  EXPECT_NEAR(wb.at(kRouge), 0.5, 1e-15);
  EXPECT_EQ(wb.count(kLength), 0u);
}

TEST(Weights, DefaultFactorsAndErrors) {
  using enum RewardKind;
  WeightingConfig cfg{{{kTopic, 1.0}, {kLength, 1.0}}, {}};
  EXPECT_NEAR(normalize_weights(cfg).at(kTopic), 2.0 / 3.0, 1e-15);
  WeightingConfig bad{{{kTopic, 0.0}}, {}};
  EXPECT_EQ(kind_of([&] { normalize_weights(bad); }), ErrorKind::kDomain);
  WeightingConfig negative_factor{{{kTopic, 1.0}}, {{kTopic, -1.0}}};
  EXPECT_EQ(kind_of([&] { normalize_weights(negative_factor); }), ErrorKind::kDomain);
}

TEST(Weights, SumToOneAndScaleInvariant) {
  using enum RewardKind;
  testing::Gen gen(31);
  for (int trial = 0; trial < 500; ++trial) {
    WeightingConfig cfg;
    for (auto k : {kTopic, kLength, kRouge}) {
      if (k != kTopic && gen.unit() < 0.3) continue;
      cfg.sigmas[k] = gen.uniform(1e-3, 2.0);
      cfg.factors[k] = gen.uniform(0.1, 5.0);
    }
    const auto w = normalize_weights(cfg);
    double sum = 0.0;
    for (const auto& [_, v] : w) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    auto scaled = cfg;
    const double c = gen.uniform(0.01, 100.0);
    for (auto& [_, s] : scaled.sigmas) s *= c;
    const auto ws = normalize_weights(scaled);
    for (const auto& [k, v] : w) EXPECT_NEAR(ws.at(k), v, 1e-9);
  }
}

TEST(Sigmas, PopulationStdWithFloor) {
  using enum RewardKind;
  const auto s = estimate_sigmas({{kTopic, {0.2, 0.4}}, {kLength, {0.5, 0.5, 0.5}}, {kRouge, {0.9}}});
  EXPECT_NEAR(s.at(kTopic), 0.1, 1e-15);
  EXPECT_EQ(s.at(kLength), kSigmaFloor);
  EXPECT_EQ(s.at(kRouge), kSigmaFloor);
  EXPECT_EQ(population_std(std::vector<double>{}), 0.0);
}

TEST(TotalReward, Fixtures) {
  using enum RewardKind;
  EXPECT_NEAR(total_reward({{kTopic, 0.6}, {kLength, 0.4}}, {{kTopic, 0.8}, {kLength, 0.2}}), 0.56,
              1e-15);
  EXPECT_NEAR(total_reward({{kTopic, 1}, {kLength, 1}}, {{kTopic, 0.37}, {kLength, 0.63}}), 1.0,
              1e-15);
  EXPECT_EQ(total_reward({{kRouge, 0.42}}, {{kRouge, 1.0}}), 0.42);
  EXPECT_EQ(kind_of([] { total_reward({{kTopic, 1}}, {{kLength, 1}}); }), ErrorKind::kConfiguration);
}

TEST(Presets, NamesAndFactors) {
  using enum RewardKind;
  for (const auto& name : preset_names()) EXPECT_EQ(preset(name).name, name);
  EXPECT_EQ(preset("topic+len").factors.at(kTopic), 2.0);
  EXPECT_EQ(preset("topic+rouge+len").active.size(), 3u);
  EXPECT_EQ(preset("coverage-only").mode, TopicMode::kCoverageOnly);
  EXPECT_EQ(preset("precision-only").mode, TopicMode::kPrecisionOnly);
  EXPECT_FALSE(preset("rouge+len").uses(kTopic));
  EXPECT_EQ(kind_of([] { preset("bogus"); }), ErrorKind::kConfiguration);
  EXPECT_EQ(parse_reward_kind("length"), kLength);
  EXPECT_EQ(to_string(kLength), "len");
  EXPECT_EQ(parse_topic_mode("f1"), TopicMode::kF1);
}

TEST(Presets, FactorTwoWithEqualSigmasGivesTwoThirds) {
  using enum RewardKind;
  const auto p = preset("topic+len");
  const auto w = normalize_weights({{{kTopic, 0.1}, {kLength, 0.1}}, p.factors});
  EXPECT_NEAR(w.at(kTopic), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(w.at(kLength), 1.0 / 3.0, 1e-12);
}

class ScorerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    extractor = std::make_shared<testing::ScriptedExtractor>();
    provider = std::make_shared<testing::TableProvider>();
    provider->table = {{"x", {1, 0}}, {"y", {0, 1}}};
    extractor->topics["x y"] = {"x"};
    extractor->topics["y y y y"] = {"y"};
    set = {"s", {"doc"}, std::string("x y"), std::vector<TopicList>{TopicList{{"x"}}}};
  }
  std::shared_ptr<testing::ScriptedExtractor> extractor;
  std::shared_ptr<testing::TableProvider> provider;
  corpus::DocumentSet set;
};

TEST_F(ScorerTest, ScoreCombinesComponents) {
  using enum RewardKind;
  ScorerConfig cfg;
  cfg.length.expected_tokens = 2;
  cfg.sigmas = {{kTopic, 0.05}, {kLength, 0.1}};
  cfg.summary_topic_count = 1;
  RewardScorer scorer(extractor, provider, cfg);
  const auto b = scorer.score(set, "x y");
  EXPECT_EQ(*b.r_topic_mean, 1.0);
  EXPECT_EQ(*b.r_len, 1.0);
  EXPECT_NEAR(b.r_total, 1.0, 1e-15);
  const auto b2 = scorer.score(set, "y y y y");
  EXPECT_EQ(*b2.r_topic_mean, 0.0);
  EXPECT_NEAR(*b2.r_len, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(b2.r_total, 0.2 * std::exp(-1.0), 1e-12);
  const auto j = to_json(b2);
  EXPECT_EQ(j.at("summary_topics"), io::Json::array({"y"}));
  EXPECT_FALSE(j.contains("r_rouge"));
  EXPECT_NEAR(j.at("weights").at("topic").get<double>(), 0.8, 1e-12);
}

TEST_F(ScorerTest, MissingSigmaAndMissingReference) {
  using enum RewardKind;
  ScorerConfig cfg;
  cfg.summary_topic_count = 1;
  RewardScorer scorer(extractor, provider, cfg);
  EXPECT_EQ(kind_of([&] { scorer.score(set, "x y"); }), ErrorKind::kConfiguration);

  ScorerConfig rouge;
  rouge.preset = preset("rouge+len");
  rouge.sigmas = {{kRouge, 0.1}, {kLength, 0.1}};
  RewardScorer rscorer(nullptr, nullptr, rouge);
  EXPECT_NEAR(*rscorer.score(set, "x y").r_rouge, 1.0, 1e-15);
  auto no_ref = set;
  no_ref.reference.reset();
  EXPECT_EQ(kind_of([&] { rscorer.score(no_ref, "x y"); }), ErrorKind::kConfiguration);
}

TEST_F(ScorerTest, TopicPresetWithoutExtractorIsConfigurationError) {
  EXPECT_EQ(kind_of([] { RewardScorer(nullptr, nullptr, ScorerConfig{}); }),
            ErrorKind::kConfiguration);
}

TEST_F(ScorerTest, EstimateSigmasSkipsFailures) {
  using enum RewardKind;
  ScorerConfig cfg;
  cfg.length.expected_tokens = 2;
  cfg.summary_topic_count = 1;
  RewardScorer scorer(extractor, provider, cfg);
  auto other = set;
  other.id = "t";
  auto broken = set;
  broken.id = "u";
  extractor->failing.insert("fail");
  const std::vector<corpus::DocumentSet> batch = {set, other, broken};
  std::ostringstream logs;
  log::ScopedSink sink(&logs, log::Level::kWarn);
  const auto sig = scorer.estimate_sigmas(batch, [](const corpus::DocumentSet& s) {
    return s.id == "s" ? std::string("x y") : s.id == "t" ? std::string("y y y y") : "fail";
  });
  EXPECT_NEAR(sig.at(kTopic), 0.5, 1e-15);
  EXPECT_NEAR(sig.at(kLength), (1.0 - std::exp(-1.0)) / 2.0, 1e-15);
  EXPECT_NE(logs.str().find("sigma_sample_skipped"), std::string::npos);
}

}  // namespace
}  // namespace topicsum::rewards
