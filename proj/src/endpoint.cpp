// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/endpoint.hpp"

#include <chrono>
#include <regex>
#include <thread>

#include "httplib.h"
#include "topicsum/error.hpp"
#include "topicsum/log.hpp"

namespace topicsum::endpoint {

Url parse_url(std::string_view url) {
  static const std::regex kUrl(R"(^(https?://[^/\s]+)(/[^\s]*)?$)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(url.begin(), url.end(), m, kUrl)) {
    throw Error(ErrorKind::kConfiguration, "invalid endpoint URL '" + std::string(url) + "'");
  }
  Url out;
  out.scheme_host_port = m[1].str();
  out.path = m[2].matched ? m[2].str() : "/";
  return out;
}

io::Json post_json(const HttpSettings& settings, const io::Json& body) {
  const Url url = parse_url(settings.url);
  httplib::Client client(url.scheme_host_port);
  const auto timeout = std::chrono::milliseconds(settings.timeout_ms);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                static_cast<time_t>((settings.timeout_ms % 1000) * 1000));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                          static_cast<time_t>((settings.timeout_ms % 1000) * 1000));
  httplib::Headers headers;
  if (settings.bearer_token && !settings.bearer_token->empty()) {
    headers.emplace("Authorization", "Bearer " + *settings.bearer_token);
  }
  const std::string payload = body.dump();
  const int attempts = std::max(1, settings.max_attempts);
  int backoff = settings.backoff_ms;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorKind::kProvider, settings.url + ": HTTP " + std::to_string(res->status) +
                                            " after 1 attempt(s)");
    } else {
      try {
        return io::Json::parse(res->body);
      } catch (const io::Json::parse_error&) {
        throw Error(ErrorKind::kProtocol, settings.url + ": reply is not JSON");
      }
    }
    log::warn("endpoint_retry", {{"url", settings.url}, {"attempt", attempt}, {"error", last_error}});
    if (attempt < attempts && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw Error(ErrorKind::kProvider, settings.url + ": " + last_error + " after " +
                                        std::to_string(attempts) + " attempt(s)");
}

std::string chat_reply_text(const io::Json& reply) {
  if (reply.is_object()) {
    if (auto choices = reply.find("choices"); choices != reply.end() && choices->is_array() &&
                                              !choices->empty()) {
      const auto& first = (*choices)[0];
      if (auto msg = first.find("message"); msg != first.end() && msg->is_object()) {
        if (auto content = msg->find("content"); content != msg->end() && content->is_string()) {
          return content->get<std::string>();
        }
      }
      if (auto text = first.find("text"); text != first.end() && text->is_string()) {
        return text->get<std::string>();
      }
    }
    if (auto msg = reply.find("message"); msg != reply.end() && msg->is_object()) {
      if (auto content = msg->find("content"); content != msg->end() && content->is_string()) {
        return content->get<std::string>();
      }
    }
    for (const char* key : {"content", "response", "text"}) {
      if (auto v = reply.find(key); v != reply.end() && v->is_string()) return v->get<std::string>();
    }
  }
  throw Error(ErrorKind::kProtocol, "chat reply carries no assistant text");
}

HttpChatClient::HttpChatClient(HttpSettings settings, std::string model)
    : settings_(std::move(settings)), model_(std::move(model)) {
  parse_url(settings_.url);
  if (model_.empty()) throw Error(ErrorKind::kConfiguration, "chat client requires a model name");
}

std::string HttpChatClient::complete(std::string_view prompt, double temperature) {
  io::Json body = {
      {"model", model_},
      {"messages", io::Json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
  };
  return chat_reply_text(post_json(settings_, body));
}

}  // namespace topicsum::endpoint
