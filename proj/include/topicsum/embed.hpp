// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Topic-phrase embeddings behind a provider interface, and the cosine kernel
// used by the similarity matrix.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

namespace topicsum::embed {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  double norm() const;
  bool operator==(const EmbeddingVector&) const = default;
};

/// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws kShape on a dimension
/// mismatch and kDomain on a zero-norm argument.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

enum class ProviderKind { kRemote, kDeterministic };

inline constexpr std::uint64_t kDefaultDeterministicSeed = 0x5eed7091c5ULL;

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::kDeterministic;
  std::string endpoint;    // remote only
  std::string model_name;  // remote only, e.g. "all-mpnet-base-v2"
  std::optional<std::string> api_token;
  std::size_t dim = 64;  // deterministic only
  std::uint64_t seed = kDefaultDeterministicSeed;
  int timeout_ms = 30000;
  int max_attempts = 3;
  std::size_t max_concurrency = 4;
  std::size_t batch_size = 64;
  std::optional<std::filesystem::path> cache_path;  // on-disk spill
};

/// Throws kConfiguration when required fields for the kind are missing.
void validate(const EmbeddingProviderConfig& config);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// One vector per phrase, in order.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> phrases) = 0;
  /// Stable description used as the cache namespace.
  virtual std::string identity() const = 0;
};

/// Seeds mt19937_64 from a stable hash of (phrase, seed), draws `dim`
/// standard normals and normalizes to unit length. Pure and thread-safe.
class DeterministicProvider final : public EmbeddingProvider {
 public:
  explicit DeterministicProvider(std::size_t dim, std::uint64_t seed = kDefaultDeterministicSeed);
  std::vector<EmbeddingVector> embed(std::span<const std::string> phrases) override;
  std::string identity() const override;

  EmbeddingVector embed_one(const std::string& phrase) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Sends {model, input: [..]} and accepts {"data": [{"embedding": [..]}]},
/// {"embeddings": [[..]]} or a bare array of arrays. At most
/// `max_concurrency` requests are in flight across all callers.
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(EmbeddingProviderConfig config);
  std::vector<EmbeddingVector> embed(std::span<const std::string> phrases) override;
  std::string identity() const override;

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> batch);

  EmbeddingProviderConfig config_;
  std::counting_semaphore<> in_flight_;
};

/// Memoizes another provider per phrase. With a spill path, entries are
/// loaded at construction and new ones appended as JSON lines
/// {provider, phrase, values}; lines for other provider identities are
/// ignored.
class CachedProvider final : public EmbeddingProvider {
 public:
  explicit CachedProvider(std::shared_ptr<EmbeddingProvider> inner,
                          std::optional<std::filesystem::path> spill = std::nullopt);
  std::vector<EmbeddingVector> embed(std::span<const std::string> phrases) override;
  std::string identity() const override { return inner_->identity(); }

  std::size_t cached_count() const;
  std::size_t miss_count() const;

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  std::optional<std::filesystem::path> spill_;
  mutable std::mutex mu_;
  std::map<std::string, EmbeddingVector, std::less<>> cache_;
  std::size_t misses_ = 0;
};

/// Builds the configured provider wrapped in a cache.
std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

/// Checks preconditions (non-empty list, no blank phrase) before touching the
/// provider, then validates the reply: same length, uniform dimension
/// (kProtocol otherwise), finite entries and nonzero norm.
std::vector<EmbeddingVector> embed_phrases(EmbeddingProvider& provider,
                                           std::span<const std::string> phrases);

}  // namespace topicsum::embed
