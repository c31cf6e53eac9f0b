// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Line-delimited structured logging: one JSON object per line,
// {"level", "event", ...fields}. Defaults to stderr at info level.

#pragma once

#include <iosfwd>
#include <string_view>

#include "topicsum/io.hpp"

namespace topicsum::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

void set_sink(std::ostream* sink);
void set_level(Level level);
Level level();

void emit(Level level, std::string_view event, const io::Json& fields = io::Json::object());

inline void debug(std::string_view event, const io::Json& fields = io::Json::object()) {
  emit(Level::kDebug, event, fields);
}
inline void info(std::string_view event, const io::Json& fields = io::Json::object()) {
  emit(Level::kInfo, event, fields);
}
inline void warn(std::string_view event, const io::Json& fields = io::Json::object()) {
  emit(Level::kWarn, event, fields);
}
inline void error(std::string_view event, const io::Json& fields = io::Json::object()) {
  emit(Level::kError, event, fields);
}

/// Restores the previous sink and level on scope exit.
class ScopedSink {
 public:
  ScopedSink(std::ostream* sink, Level level);
  ~ScopedSink();
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  std::ostream* previous_sink_;
  Level previous_level_;
};

}  // namespace topicsum::log
