// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "topicsum/embed.hpp"
#include "topicsum/endpoint.hpp"
#include "topicsum/topics.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace topicsum::testing {

/// Replies chosen by the first key that occurs in the prompt. Each key holds
/// a queue; the last reply repeats once the queue is drained.
class FakeChatClient final : public endpoint::ChatClient {
 public:
  void on(const std::string& prompt_substring, std::vector<std::string> replies);
  std::string complete(std::string_view prompt, double temperature) override;
  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, std::vector<std::string>>> rules_;
  std::map<std::string, std::size_t> served_;
  std::size_t calls_ = 0;
};

/// Returns fixed topic lists keyed by the exact text; texts in `failing`
/// raise kExtraction.
class ScriptedExtractor final : public topics::TopicExtractor {
 public:
  std::map<std::string, std::vector<std::string>> topics;
  std::set<std::string> failing;
  topics::ExtractionResult extract(std::string_view text, std::size_t count,
                                   TopicSource source) override;
};

/// Returns fixed vectors keyed by phrase; unknown phrases raise kLookup.
class TableProvider final : public embed::EmbeddingProvider {
 public:
  std::map<std::string, std::vector<double>> table;
  std::atomic<int> calls{0};
  std::vector<embed::EmbeddingVector> embed(std::span<const std::string> phrases) override;
  std::string identity() const override { return "table"; }
};

/// httplib server on an ephemeral localhost port, running on its own thread.
class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
  explicit MockServer(const std::string& path, Handler handler);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  std::string url() const;
  int hits() const { return hits_.load(); }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::string path_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::thread thread_;
};

}  // namespace topicsum::testing
