// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "topicsum/error.hpp"

namespace topicsum::textmetrics {
namespace {

// Decodes one UTF-8 code point at text[i], advancing i. Malformed bytes
// decode as U+FFFD and consume a single byte.
char32_t next_code_point(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + extra >= text.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_token_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  if (cp <= 0xBF) return false;  // Latin-1 controls, NBSP, symbols
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  if (cp >= 0x20A0 && cp <= 0x20CF) return false;  // currency
  if (cp >= 0x2E00 && cp <= 0x2E7F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;  // fullwidth punctuation
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  if (cp >= 0xFF3B && cp <= 0xFF40) return false;
  if (cp >= 0xFF5B && cp <= 0xFF65) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  return true;
}

char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens,
                                                  std::size_t n) {
  std::unordered_map<std::string, int> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

double f1(double precision, double recall) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = next_code_point(text, i);
    if (is_token_char(cp)) {
      append_utf8(current, fold_case(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double rouge_n(std::span<const std::string> candidate,
               std::span<const std::string> reference, int order) {
  if (order < 1) throw Error(ErrorKind::kDomain, "rouge_n order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  if (candidate.size() < n || reference.size() < n) return 0.0;
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  long matches = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - n + 1);
  const double ref_total = static_cast<double>(reference.size() - n + 1);
  return f1(static_cast<double>(matches) / cand_total,
            static_cast<double>(matches) / ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::span<const std::string> candidate,
               std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  return f1(lcs / static_cast<double>(candidate.size()),
            lcs / static_cast<double>(reference.size()));
}

double geometric_mean(double r1, double r2, double rl) {
  if (r1 <= 0.0 || r2 <= 0.0 || rl <= 0.0) return 0.0;
  return std::cbrt(r1 * r2 * rl);
}

RougeScores rouge_scores(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  RougeScores s;
  s.r1 = rouge_n(cand, ref, 1);
  s.r2 = rouge_n(cand, ref, 2);
  s.rl = rouge_l(cand, ref);
  s.rm = geometric_mean(s.r1, s.r2, s.rl);
  return s;
}

double rouge_reward(std::string_view candidate, std::string_view reference) {
  if (reference.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos) {
    throw Error(ErrorKind::kConfiguration,
                "reference-based reward requested but the reference is empty");
  }
  return rouge_scores(candidate, reference).rm;
}

}  // namespace topicsum::textmetrics
