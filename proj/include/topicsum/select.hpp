// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Best-of-n selection over candidate summaries.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicsum/corpus.hpp"
#include "topicsum/io.hpp"
#include "topicsum/rewards.hpp"

namespace topicsum::select {

inline constexpr std::size_t kDefaultN = 8;

enum class SelectMetric { kTopicF1, kTotalReward };

struct CandidateScore {
  std::size_t index = 0;
  std::optional<double> score;  // absent when scoring failed
  std::optional<std::string> error;
};

struct Selection {
  std::string id;
  std::size_t winner_index = 0;
  std::string winner;
  double winner_score = 0.0;
  std::vector<CandidateScore> scores;
  std::vector<std::string> warnings;
};

io::Json to_json(const Selection& selection);

/// Index of the largest present score, lowest index on ties. std::nullopt
/// when every score is absent.
std::optional<std::size_t> argmax_first(std::span<const std::optional<double>> scores);

/// Scores every candidate (topic-F1 under f1 mode by default, R_total under
/// the scorer's preset otherwise) and returns the argmax. Failed candidates
/// are excluded with a warning; kSelection when all fail.
Selection best_of_n(const corpus::DocumentSet& set, std::span<const std::string> candidates,
                    const rewards::RewardScorer& scorer,
                    SelectMetric metric = SelectMetric::kTopicF1, std::size_t max_workers = 1);

}  // namespace topicsum::select
