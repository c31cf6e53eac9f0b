// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference-free topic alignment (coverage/precision ratios), ROUGE, per-K
// breakdowns and a detector for runaway generations.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicsum/corpus.hpp"
#include "topicsum/embed.hpp"
#include "topicsum/io.hpp"
#include "topicsum/rewards.hpp"
#include "topicsum/textmetrics.hpp"
#include "topicsum/tokenizer.hpp"
#include "topicsum/topics.hpp"

namespace topicsum::evalharness {

inline constexpr std::size_t kDefaultTokenLimit = 2500;
inline constexpr std::size_t kRepeatPeriodMax = 10;
inline constexpr std::size_t kRepeatSpan = 50;

enum class FailureReason { kOverlong, kRepetitive };

std::string_view to_string(FailureReason reason);

struct FailureCheck {
  bool flagged = false;
  std::optional<FailureReason> reason;
};

/// Overlong when the whitespace token count exceeds `token_limit`.
/// Repetitive when the second half of the tokens contains a stretch of at
/// least 50 tokens that is periodic with some period p <= 10 (for example a
/// 10-token window repeated 5 times in a row).
FailureCheck detect_failure(std::string_view summary, std::size_t token_limit = kDefaultTokenLimit);

struct Alignment {
  double cov_ratio = 0.0;
  double pre_ratio = 0.0;
  double topic_f1 = 0.0;
};

/// Means of coverage and precision over the pairs, and their harmonic mean.
Alignment alignment_from_pairs(std::span<const rewards::TopicPairScore> pairs);

Alignment topic_alignment_eval(const corpus::DocumentSet& set, std::string_view summary,
                               topics::TopicExtractor& extractor,
                               embed::EmbeddingProvider& provider, std::size_t m);

struct EvalConfig {
  bool topic = true;
  bool rouge = false;
  std::size_t summary_topic_count = 5;
  std::size_t token_limit = kDefaultTokenLimit;
  std::string tokenizer_id = std::string(kWhitespaceTokenizer);
  std::size_t max_workers = 1;
};

struct RecordRow {
  std::string id;
  std::size_t doc_count = 0;
  std::optional<Alignment> alignment;
  std::optional<textmetrics::RougeScores> rouge;  // absent without a reference
  std::size_t length_tokens = 0;
  bool failure_flag = false;
  std::optional<FailureReason> failure_reason;
};

struct Aggregate {
  std::size_t count = 0;
  std::optional<double> cov_ratio;
  std::optional<double> pre_ratio;
  std::optional<double> topic_f1;
  std::optional<double> rouge1;
  std::optional<double> rouge2;
  std::optional<double> rougeL;
  std::optional<double> rougeM;
  double length_tokens = 0.0;
  double failure_rate = 0.0;
};

/// Arithmetic means of each column over the rows that carry it.
Aggregate aggregate(std::span<const RecordRow> rows);

struct RecordError {
  std::string id;
  std::string error;
};

struct EvalReport {
  std::vector<RecordRow> per_record;  // dataset order
  Aggregate aggregates;
  std::map<std::size_t, Aggregate> by_doc_count;
  double failure_rate = 0.0;
  std::vector<std::string> missing_ids;
  std::vector<RecordError> errors;
};

/// Records without a summary are listed as missing; records whose
/// evaluation throws are listed as errors. Both are left out of the
/// aggregates. `extractor` and `provider` may be null when cfg.topic is off.
EvalReport evaluate(std::span<const corpus::DocumentSet> dataset,
                    const std::map<std::string, std::string>& summaries, const EvalConfig& cfg,
                    topics::TopicExtractor* extractor, embed::EmbeddingProvider* provider);

io::Json to_json(const EvalReport& report);

}  // namespace topicsum::evalharness
