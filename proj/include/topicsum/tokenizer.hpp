// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Token counting used for word statistics, the length reward and the failure
// detector. Counters are looked up by id so a deployment can register a
// subword tokenizer without touching the reward code.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace topicsum {

inline constexpr std::string_view kWhitespaceTokenizer = "whitespace";
inline constexpr std::string_view kWordTokenizer = "word";

using TokenCounter = std::function<std::size_t(std::string_view)>;

std::vector<std::string_view> whitespace_split(std::string_view text);

std::size_t whitespace_count(std::string_view text);

/// Sentences are maximal spans ending in '.', '!' or '?' (or end of text)
/// that contain at least one non-space character.
std::size_t sentence_count(std::string_view text);

/// Counts tokens with the counter registered under `tokenizer_id`.
/// Built-ins: "whitespace" (default) and "word" (the ROUGE tokenizer).
std::size_t count_tokens(std::string_view text,
                         std::string_view tokenizer_id = kWhitespaceTokenizer);

/// Replaces any existing counter with the same id.
void register_tokenizer(std::string id, TokenCounter counter);

bool has_tokenizer(std::string_view tokenizer_id);

}  // namespace topicsum
