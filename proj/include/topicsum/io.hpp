// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace topicsum::io {

using Json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line of a JSONL
/// stream. Line numbers are 1-based. A line that is not a JSON object throws
/// kParse naming the line. Return false from `fn` to stop early.
void for_each_jsonl(std::istream& in,
                    const std::function<bool(const Json&, std::size_t)>& fn);

void for_each_jsonl_file(const std::filesystem::path& path,
                         const std::function<bool(const Json&, std::size_t)>& fn);

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written output.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view text);

bool is_blank(std::string_view text);

}  // namespace topicsum::io
