// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/corpus.hpp"

#include <fstream>
#include <set>

#include "topicsum/error.hpp"
#include "topicsum/tokenizer.hpp"

namespace topicsum::corpus {
namespace {

std::string where(std::size_t line_number) {
  return line_number == 0 ? std::string("record") : "line " + std::to_string(line_number);
}

[[noreturn]] void parse_fail(std::size_t line_number, const std::string& what) {
  throw Error(ErrorKind::kParse, where(line_number) + ": " + what);
}

std::vector<std::string> string_array(const io::Json& value, std::size_t line_number,
                                      const char* field) {
  if (!value.is_array()) parse_fail(line_number, std::string("'") + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      parse_fail(line_number, std::string("'") + field + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<TopicList> topic_lists(const io::Json& value, std::size_t line_number) {
  if (!value.is_array()) parse_fail(line_number, "'doc_topics' must be an array of arrays");
  std::vector<TopicList> out;
  for (const auto& entry : value) {
    TopicList list;
    for (auto& phrase : string_array(entry, line_number, "doc_topics")) {
      list.phrases.push_back(io::trim(phrase));
    }
    out.push_back(std::move(list));
  }
  return out;
}

io::Json topics_json(const std::vector<TopicList>& lists) {
  io::Json out = io::Json::array();
  for (const auto& list : lists) out.push_back(list.phrases);
  return out;
}

std::string required_id(const io::Json& record, std::size_t line_number) {
  auto it = record.find("id");
  if (it == record.end() || !it->is_string()) parse_fail(line_number, "missing string field 'id'");
  return it->get<std::string>();
}

}  // namespace

void validate(const DocumentSet& set) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kValidation, "record '" + set.id + "': " + what);
  };
  if (set.documents.empty()) fail("documents list is empty");
  for (std::size_t k = 0; k < set.documents.size(); ++k) {
    if (io::is_blank(set.documents[k])) fail("document " + std::to_string(k) + " is empty");
  }
  if (set.doc_topics) {
    if (set.doc_topics->size() != set.documents.size()) {
      fail("doc_topics has " + std::to_string(set.doc_topics->size()) +
           " entries for " + std::to_string(set.documents.size()) + " documents");
    }
    for (const auto& list : *set.doc_topics) {
      if (list.phrases.empty()) fail("a document topic list is empty");
      for (const auto& phrase : list.phrases) {
        if (io::is_blank(phrase)) fail("empty topic phrase");
      }
    }
  }
}

DocumentSet from_json(const io::Json& record, std::size_t line_number) {
  DocumentSet set;
  set.id = required_id(record, line_number);
  auto docs = record.find("documents");
  if (docs == record.end()) parse_fail(line_number, "missing field 'documents'");
  set.documents = string_array(*docs, line_number, "documents");
  if (auto ref = record.find("reference"); ref != record.end() && !ref->is_null()) {
    if (!ref->is_string()) parse_fail(line_number, "'reference' must be a string");
    set.reference = ref->get<std::string>();
  }
  if (auto topics = record.find("doc_topics"); topics != record.end() && !topics->is_null()) {
    set.doc_topics = topic_lists(*topics, line_number);
  }
  validate(set);
  return set;
}

io::Json to_json(const DocumentSet& set) {
  io::Json out;
  out["id"] = set.id;
  out["documents"] = set.documents;
  if (set.reference) out["reference"] = *set.reference;
  if (set.doc_topics) out["doc_topics"] = topics_json(*set.doc_topics);
  return out;
}

std::string serialize(const DocumentSet& set) { return to_json(set).dump(); }

std::vector<DocumentSet> load_dataset(std::istream& in, std::optional<std::size_t> limit) {
  std::vector<DocumentSet> out;
  if (limit && *limit == 0) return out;
  io::for_each_jsonl(in, [&](const io::Json& record, std::size_t line) {
    out.push_back(from_json(record, line));
    return !(limit && out.size() >= *limit);
  });
  return out;
}

std::vector<DocumentSet> load_dataset(const std::filesystem::path& path,
                                      std::optional<std::size_t> limit) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return load_dataset(in, limit);
}

void save_dataset(const std::filesystem::path& path, std::span<const DocumentSet> dataset) {
  std::string content;
  for (const auto& set : dataset) {
    content += serialize(set);
    content += '\n';
  }
  io::write_text_file(path, content);
}

CorpusStats compute_stats(std::span<const DocumentSet> dataset) {
  if (dataset.empty()) throw Error(ErrorKind::kEmptyInput, "compute_stats: dataset is empty");
  CorpusStats stats;
  stats.record_count = dataset.size();
  std::size_t doc_total = 0;
  double doc_words = 0.0;
  double doc_sents = 0.0;
  double sum_words = 0.0;
  double sum_sents = 0.0;
  for (const auto& set : dataset) {
    ++stats.doc_count_histogram[set.doc_count()];
    for (const auto& doc : set.documents) {
      ++doc_total;
      doc_words += static_cast<double>(whitespace_count(doc));
      doc_sents += static_cast<double>(sentence_count(doc));
    }
    if (set.reference) {
      ++stats.records_with_reference;
      sum_words += static_cast<double>(whitespace_count(*set.reference));
      sum_sents += static_cast<double>(sentence_count(*set.reference));
    }
  }
  const auto records = static_cast<double>(stats.record_count);
  stats.mean_docs_per_record = static_cast<double>(doc_total) / records;
  if (doc_total > 0) {
    stats.mean_doc_words = doc_words / static_cast<double>(doc_total);
    stats.mean_doc_sentences = doc_sents / static_cast<double>(doc_total);
  }
  if (stats.records_with_reference > 0) {
    const auto refs = static_cast<double>(stats.records_with_reference);
    stats.mean_summary_words = sum_words / refs;
    stats.mean_summary_sentences = sum_sents / refs;
  }
  return stats;
}

io::Json to_json(const CorpusStats& stats) {
  io::Json hist = io::Json::object();
  for (const auto& [k, count] : stats.doc_count_histogram) hist[std::to_string(k)] = count;
  return {
      {"record_count", stats.record_count},
      {"doc_count_histogram", hist},
      {"mean_docs_per_record", stats.mean_docs_per_record},
      {"mean_doc_words", stats.mean_doc_words},
      {"mean_doc_sentences", stats.mean_doc_sentences},
      {"mean_summary_words", stats.mean_summary_words},
      {"mean_summary_sentences", stats.mean_summary_sentences},
      {"records_with_reference", stats.records_with_reference},
  };
}

std::map<std::string, std::vector<TopicList>> load_topics(const std::filesystem::path& path) {
  std::map<std::string, std::vector<TopicList>> out;
  io::for_each_jsonl_file(path, [&](const io::Json& record, std::size_t line) {
    auto id = required_id(record, line);
    auto topics = record.find("doc_topics");
    if (topics == record.end()) parse_fail(line, "missing field 'doc_topics'");
    out[id] = topic_lists(*topics, line);
    return true;
  });
  return out;
}

void save_topics(const std::filesystem::path& path, std::span<const DocumentSet> dataset) {
  std::string content;
  for (const auto& set : dataset) {
    if (!set.doc_topics) continue;
    io::Json line = {{"id", set.id}, {"doc_topics", topics_json(*set.doc_topics)}};
    content += line.dump();
    content += '\n';
  }
  io::write_text_file(path, content);
}

void merge_topics(std::vector<DocumentSet>& dataset,
                  const std::map<std::string, std::vector<TopicList>>& topics) {
  for (auto& set : dataset) {
    auto it = topics.find(set.id);
    if (it == topics.end()) continue;
    set.doc_topics = it->second;
    validate(set);
  }
}

std::map<std::string, std::string> load_summaries(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  io::for_each_jsonl_file(path, [&](const io::Json& record, std::size_t line) {
    auto id = required_id(record, line);
    auto summary = record.find("summary");
    if (summary == record.end() || !summary->is_string()) {
      parse_fail(line, "missing string field 'summary'");
    }
    if (!out.emplace(id, summary->get<std::string>()).second) {
      throw Error(ErrorKind::kValidation, "duplicate summary for id '" + id + "'");
    }
    return true;
  });
  return out;
}

std::vector<CandidatePool> load_candidates(const std::filesystem::path& path) {
  std::vector<CandidatePool> out;
  std::set<std::string> seen;
  io::for_each_jsonl_file(path, [&](const io::Json& record, std::size_t line) {
    CandidatePool pool;
    pool.id = required_id(record, line);
    auto cands = record.find("candidates");
    if (cands == record.end()) parse_fail(line, "missing field 'candidates'");
    pool.candidates = string_array(*cands, line, "candidates");
    if (pool.candidates.empty()) {
      throw Error(ErrorKind::kValidation, "record '" + pool.id + "': candidates list is empty");
    }
    if (!seen.insert(pool.id).second) {
      throw Error(ErrorKind::kValidation, "duplicate candidates for id '" + pool.id + "'");
    }
    out.push_back(std::move(pool));
    return true;
  });
  return out;
}

}  // namespace topicsum::corpus
