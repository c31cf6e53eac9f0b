// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "topicsum/io.hpp"

namespace topicsum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kEnvEmbedEndpoint = "TOPICSUM_EMBED_ENDPOINT";
inline constexpr const char* kEnvChatEndpoint = "TOPICSUM_CHAT_ENDPOINT";
inline constexpr const char* kEnvApiToken = "TOPICSUM_API_TOKEN";

/// Built-in defaults for a dataset preset ("news" or "xscience").
io::Json default_config(const std::string& dataset_preset);

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out`; logs and structured errors go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace topicsum::cli
