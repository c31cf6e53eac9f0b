// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace topicsum {

/// Runs fn(i) for i in [0, count) on up to `max_workers` threads. Work is
/// pulled in index order; callers write results into slot i so the output
/// order never depends on scheduling. The first exception is rethrown after
/// all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t max_workers, Fn&& fn) {
  const std::size_t workers = std::min(count, std::max<std::size_t>(1, max_workers));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace topicsum
