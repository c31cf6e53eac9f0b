// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Topic-phrase extraction (LLM-backed or an offline frequency extractor) and
// construction of topic-augmented summarization prompts.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "topicsum/corpus.hpp"
#include "topicsum/endpoint.hpp"

namespace topicsum::topics {

enum class ExtractorKind { kLlm, kFrequency };

struct TopicExtractorConfig {
  ExtractorKind kind = ExtractorKind::kFrequency;
  std::string endpoint;    // llm only
  std::string model_name;  // llm only
  std::optional<std::string> api_token;
  std::size_t count = 5;
  double temperature = 0.0;
  std::string stopword_list_id = "english";  // frequency only
  int timeout_ms = 60000;
  int max_attempts = 3;
  std::size_t max_concurrency = 4;
};

void validate(const TopicExtractorConfig& config);

struct ExtractionResult {
  TopicList topics;
  std::vector<std::string> warnings;
};

class TopicExtractor {
 public:
  virtual ~TopicExtractor() = default;
  /// Returns exactly `count` phrases or throws kExtraction.
  virtual ExtractionResult extract(std::string_view text, std::size_t count,
                                   TopicSource source) = 0;
  /// Upper bound on useful parallel calls.
  virtual std::size_t max_concurrency() const { return 1; }
};

/// "english" (built-in list), "none", or "file:<path>" with one word per line.
std::unordered_set<std::string> load_stopwords(std::string_view stopword_list_id);

/// Lowercases, drops punctuation, stopwords and digit-only tokens, then
/// scores unigrams by count and adjacent non-stopword bigrams that occur at
/// least twice by 1.5 x count. Ties break alphabetically. Pads by repeating
/// the top terms (with a warning) when there are fewer candidates than
/// requested.
class FrequencyExtractor final : public TopicExtractor {
 public:
  explicit FrequencyExtractor(std::string_view stopword_list_id = "english");
  explicit FrequencyExtractor(std::unordered_set<std::string> stopwords);
  ExtractionResult extract(std::string_view text, std::size_t count, TopicSource source) override;

 private:
  std::unordered_set<std::string> stopwords_;
};

/// Sends the topic-labelling prompt, repairs the reply and re-asks once when
/// it has too few items.
class LlmExtractor final : public TopicExtractor {
 public:
  LlmExtractor(std::shared_ptr<endpoint::ChatClient> client, double temperature,
               std::size_t max_concurrency = 1);
  ExtractionResult extract(std::string_view text, std::size_t count, TopicSource source) override;
  std::size_t max_concurrency() const override { return max_concurrency_; }

 private:
  std::shared_ptr<endpoint::ChatClient> client_;
  double temperature_;
  std::size_t max_concurrency_;
};

std::shared_ptr<TopicExtractor> make_extractor(const TopicExtractorConfig& config);

/// "one" .. "twenty", digits beyond.
std::string spell_count(std::size_t n);

std::string topic_extraction_prompt(std::string_view text, std::size_t count);

/// Repair pipeline: split on commas/newlines, strip numbering and bullets,
/// trim whitespace, quotes, markdown emphasis and trailing periods, drop
/// empties. Does not enforce a count.
std::vector<std::string> parse_topic_reply(std::string_view reply);

/// Validates preconditions (non-blank text, count >= 1), then delegates.
ExtractionResult extract_topics(TopicExtractor& extractor, std::string_view text,
                                std::size_t count,
                                TopicSource source = TopicSource::kDocument);

struct DatasetExtraction {
  std::vector<corpus::DocumentSet> dataset;  // input order; skipped records keep their state
  std::vector<std::string> skipped_ids;
  std::size_t extracted_documents = 0;
  std::size_t warnings = 0;
};

/// Fills doc_topics with n phrases per document. Records that already carry
/// n-phrase lists are returned unchanged. A failure on any document skips the
/// whole record (logged with its id).
DatasetExtraction extract_for_dataset(TopicExtractor& extractor,
                                      std::span<const corpus::DocumentSet> dataset,
                                      std::size_t n);

enum class PromptStyle { kNews, kXScience };

/// Summarization instruction followed by the documents; with topics, each
/// document's labels follow it immediately ("{doc 1}, {topics 1}, ...").
/// Throws kConfiguration if topics are requested but absent.
std::string build_topic_prompt(const corpus::DocumentSet& set, PromptStyle style,
                               bool with_topics);

}  // namespace topicsum::topics
