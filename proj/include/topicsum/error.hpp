// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topicsum {

enum class ErrorKind {
  kParse,          // malformed input record
  kValidation,     // record violates a data-model invariant
  kEmptyInput,
  kShape,          // dimension / length mismatch
  kDomain,         // value outside the function's domain
  kConfiguration,  // inconsistent or missing configuration
  kPrecondition,
  kProvider,       // remote transport failure
  kProtocol,       // remote endpoint replied with an unexpected shape
  kExtraction,     // topic extraction could not produce a valid list
  kReward,
  kNumeric,
  kLookup,
  kSelection,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers branch
/// without a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace topicsum
