// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations written independently of the library, plus a
// small deterministic generator for property tests.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "topicsum/io.hpp"

namespace topicsum::testing {

/// Deterministic generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Integer in [lo, hi].
  std::size_t range(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

using Matrix = std::vector<std::vector<double>>;

/// Mean over rows of the row maximum, by explicit double loop.
double naive_coverage(const Matrix& m);
/// Mean over columns of the column maximum, by explicit double loop.
double naive_precision(const Matrix& m);

/// Longest common subsequence by enumerating every subsequence of `a`
/// (exponential; use on short inputs only).
std::size_t exhaustive_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Clipped surrogate minus beta * KL for a categorical policy, computed from
/// first principles (plain exp/sum softmax, direct ratio of probabilities).
double surrogate_oracle(const std::vector<double>& theta, const std::vector<double>& theta_old,
                        const std::vector<double>& theta_ref, const std::vector<std::size_t>& samples,
                        const std::vector<double>& advantages, double epsilon, double beta);

/// Central finite-difference gradient.
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double h);

/// Empty when `actual` matches `expected` (numbers within `tol`, everything
/// else exactly); otherwise a description of the first mismatch.
std::string json_mismatch(const io::Json& expected, const io::Json& actual, double tol,
                          const std::string& path = "");

std::string data_path(const std::string& name);

}  // namespace topicsum::testing
