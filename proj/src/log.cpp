// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace topicsum::log {
namespace {

std::mutex g_mu;
std::ostream* g_sink = &std::cerr;
std::atomic<Level> g_level{Level::kInfo};

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
    case Level::kOff: return "off";
  }
  return "info";
}

}  // namespace

void set_sink(std::ostream* sink) {
  std::lock_guard lock(g_mu);
  g_sink = sink;
}

void set_level(Level level) { g_level = level; }

Level level() { return g_level; }

void emit(Level lvl, std::string_view event, const io::Json& fields) {
  if (lvl < g_level.load() || lvl == Level::kOff) return;
  io::Json record = {{"level", level_name(lvl)}, {"event", event}};
  if (fields.is_object()) {
    for (auto it = fields.begin(); it != fields.end(); ++it) record[it.key()] = it.value();
  }
  const auto line = record.dump(-1, ' ', false, io::Json::error_handler_t::replace);
  std::lock_guard lock(g_mu);
  if (g_sink == nullptr) return;
  *g_sink << line << '\n';
  g_sink->flush();
}

ScopedSink::ScopedSink(std::ostream* sink, Level lvl) : previous_level_(g_level.load()) {
  {
    std::lock_guard lock(g_mu);
    previous_sink_ = g_sink;
    g_sink = sink;
  }
  g_level = lvl;
}

ScopedSink::~ScopedSink() {
  {
    std::lock_guard lock(g_mu);
    g_sink = previous_sink_;
  }
  g_level = previous_level_;
}

}  // namespace topicsum::log
