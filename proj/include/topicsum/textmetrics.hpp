// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// ROUGE-1/2/L (balanced F1, no stemming, no stopword removal, summary-level
// LCS) and their geometric mean.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topicsum::textmetrics {

struct RougeScores {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
  double rm = 0.0;  // (r1 * r2 * rl)^(1/3), 0 when any factor is 0
};

/// Lowercases and splits on whitespace and punctuation; punctuation is
/// dropped. UTF-8 aware: general/CJK/fullwidth punctuation code points
/// (e.g. the em dash) are separators, other non-ASCII letters are kept.
/// Case folding covers ASCII and Latin-1.
std::vector<std::string> tokenize(std::string_view text);

/// F1 of clipped n-gram overlap. 0 when either side has no n-grams.
/// `order` must be >= 1 (1 and 2 are the ones reported).
double rouge_n(std::span<const std::string> candidate,
               std::span<const std::string> reference, int order);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// F1 from the longest common subsequence over the whole token sequences.
double rouge_l(std::span<const std::string> candidate,
               std::span<const std::string> reference);

/// Cube root of the product; exactly 0 if any factor is <= 0.
double geometric_mean(double r1, double r2, double rl);

RougeScores rouge_scores(std::string_view candidate, std::string_view reference);

/// Geometric mean of ROUGE-1/2/L. Throws kConfiguration on an empty
/// (whitespace-only) reference.
double rouge_reward(std::string_view candidate, std::string_view reference);

}  // namespace topicsum::textmetrics
