// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/io.hpp"

#include <fstream>
#include <sstream>

#include "topicsum/error.hpp"

namespace topicsum {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kShape: return "shape_error";
    case ErrorKind::kDomain: return "domain_error";
    case ErrorKind::kConfiguration: return "configuration_error";
    case ErrorKind::kPrecondition: return "precondition_error";
    case ErrorKind::kProvider: return "provider_error";
    case ErrorKind::kProtocol: return "protocol_error";
    case ErrorKind::kExtraction: return "extraction_error";
    case ErrorKind::kReward: return "reward_error";
    case ErrorKind::kNumeric: return "numeric_error";
    case ErrorKind::kLookup: return "lookup_error";
    case ErrorKind::kSelection: return "selection_error";
    case ErrorKind::kIo: return "io_error";
  }
  return "error";
}

namespace io {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return std::string(text.substr(first, last - first + 1));
}

bool is_blank(std::string_view text) {
  return text.find_first_not_of(kSpace) == std::string_view::npos;
}

void for_each_jsonl(std::istream& in,
                    const std::function<bool(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) +
                                         ": malformed JSON: " + e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(line_number) + ": record is not a JSON object");
    }
    if (!fn(record, line_number)) return;
  }
}

void for_each_jsonl_file(const std::filesystem::path& path,
                         const std::function<bool(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  for_each_jsonl(in, fn);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace io
}  // namespace topicsum
