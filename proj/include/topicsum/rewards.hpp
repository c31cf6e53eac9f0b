// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Topic-F1, length and ROUGE rewards and their inverse-std weighted total.

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicsum/corpus.hpp"
#include "topicsum/embed.hpp"
#include "topicsum/io.hpp"
#include "topicsum/tokenizer.hpp"
#include "topicsum/topics.hpp"

namespace topicsum::rewards {

enum class RewardKind { kTopic, kLength, kRouge };

std::string_view to_string(RewardKind kind);
/// Accepts "topic", "len"/"length", "rouge".
RewardKind parse_reward_kind(std::string_view name);

enum class TopicMode { kF1, kCoverageOnly, kPrecisionOnly };

std::string_view to_string(TopicMode mode);
TopicMode parse_topic_mode(std::string_view name);

/// Row-major n x m matrix; rows are document topics, columns summary topics.
struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;

  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t n, std::size_t m, std::vector<double> values);
  static SimilarityMatrix from_rows(const std::vector<std::vector<double>>& rows);

  double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  SimilarityMatrix transpose() const;
};

/// entries[i][j] = cosine(doc_i, sum_j). kPrecondition on an empty side,
/// kShape on a dimension mismatch.
SimilarityMatrix similarity_matrix(std::span<const embed::EmbeddingVector> doc_topics,
                                   std::span<const embed::EmbeddingVector> sum_topics);

struct TopicPairScore {
  double coverage = 0.0;
  double precision = 0.0;
  double harmonic = 0.0;  // effective reward under the mode
};

/// 2cp/(c+p) with negative inputs clamped to 0; 0 when the clamped sum is 0.
double harmonic_mean(double coverage, double precision);

TopicPairScore pair_score(const SimilarityMatrix& m, TopicMode mode = TopicMode::kF1);

struct TopicReward {
  double r_topic = 0.0;
  std::vector<TopicPairScore> per_pair;
  TopicList summary_topics;
};

/// Extracts m summary topics once, embeds every phrase in one provider call
/// and averages the K per-document pair scores. Summary extraction failures
/// surface as kReward; missing doc_topics as kPrecondition.
TopicReward topic_reward(const corpus::DocumentSet& set, std::string_view summary,
                         topics::TopicExtractor& extractor, embed::EmbeddingProvider& provider,
                         std::size_t m, TopicMode mode = TopicMode::kF1);

/// Pair scores for already-extracted summary topics.
std::vector<TopicPairScore> pair_scores(const corpus::DocumentSet& set,
                                        const TopicList& summary_topics,
                                        embed::EmbeddingProvider& provider, TopicMode mode);

struct LengthConfig {
  std::size_t expected_tokens = 1;
  std::string tokenizer_id = std::string(kWhitespaceTokenizer);
};

/// exp(-|l_exp - l_sum| / l_exp). kDomain when l_exp is 0.
double length_reward(std::size_t l_sum, std::size_t l_exp);
double length_reward(std::string_view summary, const LengthConfig& cfg);

/// Rounded mean reference length. kConfiguration on a missing reference,
/// kEmptyInput on an empty set.
std::size_t estimate_expected_length(std::span<const corpus::DocumentSet> validation,
                                     std::string_view tokenizer_id = kWhitespaceTokenizer);

using RewardMap = std::map<RewardKind, double>;

double default_factor(RewardKind kind);

struct WeightingConfig {
  RewardMap sigmas;   // keys define the active rewards
  RewardMap factors;  // missing keys fall back to default_factor
  TopicMode mode = TopicMode::kF1;
};

/// (factor_r / sigma_r) / sum_k (factor_k / sigma_k) over the keys of
/// `sigmas`. kDomain on a nonpositive or non-finite sigma or factor.
RewardMap normalize_weights(const WeightingConfig& cfg);

/// Population standard deviation; 0 for fewer than two values.
double population_std(std::span<const double> values);

inline constexpr double kSigmaFloor = 1e-6;

/// Population std of each sample list, floored at kSigmaFloor.
RewardMap estimate_sigmas(const std::map<RewardKind, std::vector<double>>& samples);

/// Sum of weight * component. kConfiguration when the key sets differ.
double total_reward(const RewardMap& components, const RewardMap& weights);

struct RewardPreset {
  std::string name;
  std::vector<RewardKind> active;
  RewardMap factors;
  TopicMode mode = TopicMode::kF1;

  bool uses(RewardKind kind) const;
};

/// topic+len, topic+rouge+len, rouge+len, topic+rouge, topic,
/// coverage-only, precision-only. kConfiguration for other names.
RewardPreset preset(std::string_view name);
std::vector<std::string> preset_names();

struct RewardBreakdown {
  std::vector<TopicPairScore> per_pair;
  std::optional<double> r_topic_mean;
  std::optional<double> r_len;
  std::optional<double> r_rouge;
  RewardMap weights;
  double r_total = 0.0;
  std::vector<std::string> summary_topics;

  RewardMap components() const;
};

io::Json to_json(const RewardBreakdown& breakdown);

struct ScorerConfig {
  RewardPreset preset = rewards::preset("topic+len");
  LengthConfig length;
  RewardMap sigmas;  // required for score(); see estimate_sigmas
  std::size_t summary_topic_count = 5;
};

/// Bundles an extractor, an embedding provider and a preset. Safe to call
/// from several threads if the extractor and provider are.
class RewardScorer {
 public:
  RewardScorer(std::shared_ptr<topics::TopicExtractor> extractor,
               std::shared_ptr<embed::EmbeddingProvider> provider, ScorerConfig config);

  /// Raw values of the preset's active rewards.
  RewardMap components(const corpus::DocumentSet& set, std::string_view summary) const;
  RewardBreakdown score(const corpus::DocumentSet& set, std::string_view summary) const;
  TopicReward topic_reward(const corpus::DocumentSet& set, std::string_view summary,
                           TopicMode mode) const;

  /// One summary per record from `sampler`; records whose rewards fail are
  /// skipped with a warning.
  RewardMap estimate_sigmas(
      std::span<const corpus::DocumentSet> batch,
      const std::function<std::string(const corpus::DocumentSet&)>& sampler) const;

  void set_sigmas(RewardMap sigmas) { config_.sigmas = std::move(sigmas); }
  const ScorerConfig& config() const { return config_; }

 private:
  std::shared_ptr<topics::TopicExtractor> extractor_;
  std::shared_ptr<embed::EmbeddingProvider> provider_;
  ScorerConfig config_;
};

}  // namespace topicsum::rewards
