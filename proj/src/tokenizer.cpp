// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/tokenizer.hpp"

#include <map>
#include <mutex>

#include "topicsum/error.hpp"
#include "topicsum/textmetrics.hpp"

namespace topicsum {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

struct Registry {
  std::mutex mu;
  std::map<std::string, TokenCounter, std::less<>> counters;

  Registry() {
    counters.emplace(std::string(kWhitespaceTokenizer), &whitespace_count);
    counters.emplace(std::string(kWordTokenizer), [](std::string_view text) {
      return textmetrics::tokenize(text).size();
    });
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

std::vector<std::string_view> whitespace_split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::size_t whitespace_count(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

std::size_t sentence_count(std::string_view text) {
  std::size_t n = 0;
  bool has_content = false;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (has_content) ++n;
      has_content = false;
    } else if (!is_space(c)) {
      has_content = true;
    }
  }
  if (has_content) ++n;
  return n;
}

std::size_t count_tokens(std::string_view text, std::string_view tokenizer_id) {
  TokenCounter counter;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.counters.find(tokenizer_id);
    if (it == r.counters.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "unknown tokenizer id '" + std::string(tokenizer_id) + "'");
    }
    counter = it->second;
  }
  return counter(text);
}

void register_tokenizer(std::string id, TokenCounter counter) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.counters.insert_or_assign(std::move(id), std::move(counter));
}

bool has_tokenizer(std::string_view tokenizer_id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.counters.find(tokenizer_id) != r.counters.end();
}

}  // namespace topicsum
