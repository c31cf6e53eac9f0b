// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-document summarization data model and the line-delimited record
// formats read and written by the tools:
//
//   dataset     {"id", "documents": [..], "reference"?, "doc_topics"?: [[..], ..]}
//   topics      {"id", "doc_topics": [[..], ..]}
//   summaries   {"id", "summary"}
//   candidates  {"id", "candidates": [..]}

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicsum/io.hpp"

namespace topicsum {

enum class TopicSource { kDocument, kSummary };

/// Ordered topic phrases extracted from one text. Phrases are trimmed and
/// non-empty.
struct TopicList {
  std::vector<std::string> phrases;
  TopicSource source = TopicSource::kDocument;

  std::size_t size() const { return phrases.size(); }
  bool operator==(const TopicList&) const = default;
};

namespace corpus {

/// One MDS instance: K >= 1 non-empty source documents, an optional gold
/// summary and optionally one TopicList per document.
struct DocumentSet {
  std::string id;
  std::vector<std::string> documents;
  std::optional<std::string> reference;
  std::optional<std::vector<TopicList>> doc_topics;

  std::size_t doc_count() const { return documents.size(); }
  bool has_topics() const { return doc_topics.has_value(); }

  bool operator==(const DocumentSet&) const = default;
};

struct CorpusStats {
  std::size_t record_count = 0;
  std::map<std::size_t, std::size_t> doc_count_histogram;  // K -> records
  double mean_docs_per_record = 0.0;
  double mean_doc_words = 0.0;
  double mean_doc_sentences = 0.0;
  double mean_summary_words = 0.0;      // over records with a reference
  double mean_summary_sentences = 0.0;  // over records with a reference
  std::size_t records_with_reference = 0;
};

struct CandidatePool {
  std::string id;
  std::vector<std::string> candidates;
};

/// Throws kValidation (message carries the record id) on a broken invariant.
void validate(const DocumentSet& set);

DocumentSet from_json(const io::Json& record, std::size_t line_number = 0);
io::Json to_json(const DocumentSet& set);

/// One JSONL line, without the trailing newline.
std::string serialize(const DocumentSet& set);

std::vector<DocumentSet> load_dataset(std::istream& in,
                                      std::optional<std::size_t> limit = std::nullopt);
std::vector<DocumentSet> load_dataset(const std::filesystem::path& path,
                                      std::optional<std::size_t> limit = std::nullopt);
void save_dataset(const std::filesystem::path& path, std::span<const DocumentSet> dataset);

/// Word counts use the whitespace tokenizer shared with the length reward;
/// sentences split on terminal punctuation. Throws kEmptyInput on an empty
/// dataset.
CorpusStats compute_stats(std::span<const DocumentSet> dataset);
io::Json to_json(const CorpusStats& stats);

// Topic persistence file.
std::map<std::string, std::vector<TopicList>> load_topics(const std::filesystem::path& path);
void save_topics(const std::filesystem::path& path, std::span<const DocumentSet> dataset);

/// Attaches persisted topics by id. Records without an entry are left as they
/// are; an entry whose length differs from K throws kValidation.
void merge_topics(std::vector<DocumentSet>& dataset,
                  const std::map<std::string, std::vector<TopicList>>& topics);

std::map<std::string, std::string> load_summaries(const std::filesystem::path& path);
std::vector<CandidatePool> load_candidates(const std::filesystem::path& path);

}  // namespace corpus
}  // namespace topicsum
