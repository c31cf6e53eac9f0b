// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Platform-stable randomness. std::mt19937_64 has a fully specified output
// sequence, but the <random> distributions do not, so the conversions to
// uniform / normal / categorical draws are done here.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace topicsum {

/// FNV-1a, 64-bit. Stable across platforms and runs (unlike std::hash).
std::uint64_t stable_hash(std::string_view text,
                          std::uint64_t basis = 0xcbf29ce484222325ULL);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  /// Index drawn with probability proportional to `weights` (non-negative,
  /// positive sum).
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace topicsum
