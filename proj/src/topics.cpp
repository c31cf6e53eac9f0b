// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/topics.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <regex>

#include "topicsum/error.hpp"
#include "topicsum/log.hpp"
#include "topicsum/parallel.hpp"
#include "topicsum/textmetrics.hpp"

namespace topicsum::topics {
namespace {

constexpr std::string_view kEnglishStopwords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",     "am",
    "an",      "and",     "any",    "are",     "as",      "at",      "be",      "because",
    "been",    "before",  "being",  "below",   "between", "both",    "but",     "by",
    "can",     "could",   "did",    "do",      "does",    "doing",   "down",    "during",
    "each",    "few",     "for",    "from",    "further", "had",     "has",     "have",
    "having",  "he",      "her",    "here",    "hers",    "herself", "him",     "himself",
    "his",     "how",     "i",      "if",      "in",      "into",    "is",      "it",
    "its",     "itself",  "just",   "me",      "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",    "now",     "of",      "off",     "on",      "once",
    "only",    "or",      "other",  "our",     "ours",    "out",     "over",    "own",
    "s",       "said",    "same",   "she",     "should",  "so",      "some",    "such",
    "t",       "than",    "that",   "the",     "their",   "theirs",  "them",    "then",
    "there",   "these",   "they",   "this",    "those",   "through", "to",      "too",
    "under",   "until",   "up",     "very",    "was",     "we",      "were",    "what",
    "when",    "where",   "which",  "while",   "who",     "whom",    "why",     "will",
    "with",    "would",   "you",    "your",    "yours",   "also",    "says",
};

bool digits_only(const std::string& token) {
  return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string strip_item(std::string_view raw) {
  // std::regex works on bytes, so the UTF-8 bullet is stripped separately.
  static const std::regex kNumbering(R"(^\s*(?:\(?\d+[.):](?=\s|$)|[-*])\s*)");
  std::string item = io::trim(raw);
  constexpr std::string_view kBullet = "\xE2\x80\xA2";
  if (item.starts_with(kBullet)) item.erase(0, kBullet.size());
  item = std::regex_replace(item, kNumbering, "", std::regex_constants::format_first_only);
  constexpr std::array<std::string_view, 4> kCurly = {"\xE2\x80\x9C", "\xE2\x80\x9D",
                                                      "\xE2\x80\x98", "\xE2\x80\x99"};
  bool changed = true;
  while (changed && !item.empty()) {
    changed = false;
    const std::string trimmed = io::trim(item);
    if (trimmed != item) {
      item = trimmed;
      changed = true;
    }
    if (item.empty()) break;
    const char first = item.front();
    const char last = item.back();
    if (first == '"' || first == '\'' || first == '`' || first == '*') {
      item.erase(0, 1);
      changed = true;
    }
    if (!item.empty() && (last == '"' || last == '\'' || last == '`' || last == '*' ||
                          last == '.' || last == ';')) {
      item.pop_back();
      changed = true;
    }
    for (auto q : kCurly) {
      if (item.starts_with(q)) {
        item.erase(0, q.size());
        changed = true;
      }
      if (item.ends_with(q)) {
        item.erase(item.size() - q.size());
        changed = true;
      }
    }
  }
  return item;
}

}  // namespace

void validate(const TopicExtractorConfig& config) {
  if (config.count == 0) throw Error(ErrorKind::kConfiguration, "topic count must be >= 1");
  if (config.temperature < 0.0) {
    throw Error(ErrorKind::kConfiguration, "extraction temperature must be >= 0");
  }
  if (config.kind == ExtractorKind::kLlm) {
    if (config.endpoint.empty() || config.model_name.empty()) {
      throw Error(ErrorKind::kConfiguration, "llm topic extractor requires endpoint and model");
    }
    endpoint::parse_url(config.endpoint);
  }
}

std::unordered_set<std::string> load_stopwords(std::string_view id) {
  if (id == "english") {
    std::unordered_set<std::string> out;
    for (auto w : kEnglishStopwords) out.emplace(w);
    return out;
  }
  if (id == "none") return {};
  if (id.starts_with("file:")) {
    const std::string path(id.substr(5));
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kConfiguration, "cannot open stopword file " + path);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
      for (auto& tok : textmetrics::tokenize(line)) out.insert(std::move(tok));
    }
    return out;
  }
  throw Error(ErrorKind::kConfiguration, "unknown stopword list '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------

FrequencyExtractor::FrequencyExtractor(std::string_view stopword_list_id)
    : stopwords_(load_stopwords(stopword_list_id)) {}

FrequencyExtractor::FrequencyExtractor(std::unordered_set<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {}

ExtractionResult FrequencyExtractor::extract(std::string_view text, std::size_t count,
                                             TopicSource source) {
  const auto tokens = textmetrics::tokenize(text);
  std::vector<bool> keep(tokens.size());
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    keep[i] = !stopwords_.contains(tokens[i]) && !digits_only(tokens[i]);
    if (keep[i]) scores[tokens[i]] += 1.0;
  }
  std::map<std::string, int> bigrams;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (keep[i - 1] && keep[i]) ++bigrams[tokens[i - 1] + " " + tokens[i]];
  }
  for (const auto& [phrase, n] : bigrams) {
    if (n >= 2) scores[phrase] = 1.5 * n;
  }
  if (scores.empty()) {
    throw Error(ErrorKind::kExtraction, "no candidate terms after stopword removal");
  }
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  // std::map iteration is alphabetical, so a stable sort keeps that as the
  // tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  ExtractionResult result;
  result.topics.source = source;
  for (std::size_t i = 0; i < count && i < ranked.size(); ++i) {
    result.topics.phrases.push_back(ranked[i].first);
  }
  if (ranked.size() < count) {
    const std::size_t distinct = ranked.size();
    for (std::size_t i = distinct; i < count; ++i) {
      result.topics.phrases.push_back(ranked[i % distinct].first);
    }
    result.warnings.push_back("only " + std::to_string(distinct) +
                              " distinct candidate terms; padded to " + std::to_string(count) +
                              " by repeating top terms");
  }
  return result;
}

// ---------------------------------------------------------------------------

LlmExtractor::LlmExtractor(std::shared_ptr<endpoint::ChatClient> client, double temperature,
                           std::size_t max_concurrency)
    : client_(std::move(client)),
      temperature_(temperature),
      max_concurrency_(std::max<std::size_t>(1, max_concurrency)) {
  if (!client_) throw Error(ErrorKind::kConfiguration, "LlmExtractor requires a chat client");
}

ExtractionResult LlmExtractor::extract(std::string_view text, std::size_t count,
                                       TopicSource source) {
  const std::string prompt = topic_extraction_prompt(text, count);
  std::vector<std::string> replies;
  for (int attempt = 0; attempt < 2; ++attempt) {
    replies.push_back(client_->complete(prompt, temperature_));
    auto items = parse_topic_reply(replies.back());
    if (items.size() >= count) {
      ExtractionResult result;
      result.topics.source = source;
      if (items.size() > count) {
        result.warnings.push_back("reply had " + std::to_string(items.size()) +
                                  " items; truncated to " + std::to_string(count));
        items.resize(count);
      }
      if (attempt > 0) result.warnings.push_back("needed one re-ask");
      result.topics.phrases = std::move(items);
      return result;
    }
  }
  std::string raw;
  for (std::size_t i = 0; i < replies.size(); ++i) {
    raw += (i ? " | " : "") + replies[i];
  }
  throw Error(ErrorKind::kExtraction,
              "could not parse " + std::to_string(count) + " topics from reply: " + raw);
}

std::shared_ptr<TopicExtractor> make_extractor(const TopicExtractorConfig& config) {
  validate(config);
  if (config.kind == ExtractorKind::kFrequency) {
    return std::make_shared<FrequencyExtractor>(config.stopword_list_id);
  }
  endpoint::HttpSettings settings;
  settings.url = config.endpoint;
  settings.bearer_token = config.api_token;
  settings.timeout_ms = config.timeout_ms;
  settings.max_attempts = config.max_attempts;
  auto client = std::make_shared<endpoint::HttpChatClient>(settings, config.model_name);
  return std::make_shared<LlmExtractor>(std::move(client), config.temperature,
                                        config.max_concurrency);
}

std::string spell_count(std::size_t n) {
  static constexpr std::array<std::string_view, 21> kWords = {
      "zero",    "one",     "two",       "three",    "four",     "five",    "six",
      "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
      "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};
  if (n < kWords.size()) return std::string(kWords[n]);
  return std::to_string(n);
}

std::string topic_extraction_prompt(std::string_view text, std::size_t count) {
  std::string prompt = "Label the main topics of the news article below. Reply with exactly **" +
                       spell_count(count) +
                       "** key words or short phrases, separated by commas, and nothing else.\n"
                       "Article: ";
  prompt += text;
  return prompt;
}

std::vector<std::string> parse_topic_reply(std::string_view reply) {
  std::vector<std::string> items;
  std::string current;
  auto flush = [&] {
    auto item = strip_item(current);
    if (!item.empty()) items.push_back(std::move(item));
    current.clear();
  };
  for (char c : reply) {
    if (c == ',' || c == '\n') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return items;
}

ExtractionResult extract_topics(TopicExtractor& extractor, std::string_view text,
                                std::size_t count, TopicSource source) {
  if (io::is_blank(text)) throw Error(ErrorKind::kPrecondition, "extract_topics: empty text");
  if (count == 0) throw Error(ErrorKind::kPrecondition, "extract_topics: count must be >= 1");
  auto result = extractor.extract(text, count, source);
  if (result.topics.phrases.size() != count) {
    throw Error(ErrorKind::kExtraction, "extractor returned " +
                                            std::to_string(result.topics.phrases.size()) +
                                            " phrases, expected " + std::to_string(count));
  }
  for (auto& p : result.topics.phrases) {
    p = io::trim(p);
    if (p.empty()) throw Error(ErrorKind::kExtraction, "extractor returned an empty phrase");
  }
  return result;
}

DatasetExtraction extract_for_dataset(TopicExtractor& extractor,
                                      std::span<const corpus::DocumentSet> dataset,
                                      std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kPrecondition, "extract_for_dataset: n must be >= 1");
  DatasetExtraction out;
  out.dataset.assign(dataset.begin(), dataset.end());

  struct Job {
    std::size_t record;
    std::size_t doc;
  };
  std::vector<Job> jobs;
  std::vector<bool> needs(dataset.size(), false);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& set = dataset[r];
    const bool done = set.doc_topics && set.doc_topics->size() == set.doc_count() &&
                      std::all_of(set.doc_topics->begin(), set.doc_topics->end(),
                                  [n](const TopicList& t) { return t.size() == n; });
    if (done) continue;
    needs[r] = true;
    for (std::size_t k = 0; k < set.doc_count(); ++k) jobs.push_back({r, k});
  }

  struct Slot {
    std::optional<ExtractionResult> result;
    std::string error;
  };
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), extractor.max_concurrency(), [&](std::size_t j) {
    const auto& job = jobs[j];
    try {
      slots[j].result = extract_topics(extractor, dataset[job.record].documents[job.doc], n);
    } catch (const Error& e) {
      slots[j].error = e.what();
    }
  });

  std::size_t j = 0;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (!needs[r]) continue;
    const auto& set = dataset[r];
    std::vector<TopicList> lists;
    std::string failure;
    for (std::size_t k = 0; k < set.doc_count(); ++k, ++j) {
      if (!slots[j].result) {
        if (failure.empty()) failure = "document " + std::to_string(k) + ": " + slots[j].error;
        continue;
      }
      out.warnings += slots[j].result->warnings.size();
      for (const auto& w : slots[j].result->warnings) {
        log::warn("topic_extraction_warning", {{"id", set.id}, {"document", k}, {"warning", w}});
      }
      lists.push_back(std::move(slots[j].result->topics));
    }
    if (!failure.empty()) {
      out.skipped_ids.push_back(set.id);
      log::warn("topic_extraction_skipped", {{"id", set.id}, {"error", failure}});
      continue;
    }
    out.extracted_documents += lists.size();
    out.dataset[r].doc_topics = std::move(lists);
  }
  log::info("topic_extraction_summary", {{"records", dataset.size()},
                                         {"skipped", out.skipped_ids.size()},
                                         {"documents", out.extracted_documents}});
  return out;
}

std::string build_topic_prompt(const corpus::DocumentSet& set, PromptStyle style,
                               bool with_topics) {
  if (with_topics && !set.doc_topics) {
    throw Error(ErrorKind::kConfiguration,
                "record '" + set.id + "': topic prompt requested without doc_topics");
  }
  if (with_topics && set.doc_topics->size() != set.doc_count()) {
    throw Error(ErrorKind::kValidation, "record '" + set.id + "': doc_topics length mismatch");
  }
  std::string prompt;
  if (style == PromptStyle::kNews) {
    prompt = with_topics
                 ? "Summarize the news articles below in at most ten sentences. Each article is "
                   "followed by its topic labels. Use only information found in the articles "
                   "and their labels.\n"
                 : "Summarize the news articles below in at most ten sentences. Use only "
                   "information found in the articles.\n";
  } else {
    prompt =
        "Write a related work paragraph of about five sentences for the query paper, using its "
        "abstract and the abstracts of the papers it references. Cite every referenced paper "
        "with its @cite marker.\n";
  }
  prompt += "Documents: ";
  for (std::size_t k = 0; k < set.doc_count(); ++k) {
    if (k > 0) prompt += ", ";
    prompt += set.documents[k];
    if (with_topics) {
      prompt += ", ";
      const auto& phrases = (*set.doc_topics)[k].phrases;
      for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i > 0) prompt += ", ";
        prompt += phrases[i];
      }
    }
  }
  if (with_topics) prompt += ".";
  return prompt;
}

}  // namespace topicsum::topics
