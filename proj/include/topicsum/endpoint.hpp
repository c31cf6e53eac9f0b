// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal JSON-over-HTTP client for chat-completions and embeddings
// endpoints, with bounded retries.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "topicsum/io.hpp"

namespace topicsum::endpoint {

struct Url {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1/embeddings"
};

/// Throws kConfiguration unless the URL is http(s)://host[:port][/path].
Url parse_url(std::string_view url);

struct HttpSettings {
  std::string url;
  std::optional<std::string> bearer_token;
  int timeout_ms = 30000;
  int max_attempts = 3;
  int backoff_ms = 200;  // doubled after each failed attempt
};

/// POSTs `body` and returns the parsed JSON reply. Transport errors, 429 and
/// 5xx are retried up to max_attempts; the final kProvider error reports the
/// attempt count. A reply that is not JSON throws kProtocol.
io::Json post_json(const HttpSettings& settings, const io::Json& body);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(std::string_view prompt, double temperature) = 0;
};

/// Speaks the chat-completions shape: {model, messages, temperature}. Reads
/// the assistant text from choices[0].message.content (or a few common
/// single-field variants).
class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(HttpSettings settings, std::string model);
  std::string complete(std::string_view prompt, double temperature) override;

 private:
  HttpSettings settings_;
  std::string model_;
};

/// Extracts the assistant text from a chat reply; throws kProtocol.
std::string chat_reply_text(const io::Json& reply);

}  // namespace topicsum::endpoint
