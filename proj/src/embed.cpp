// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "topicsum/endpoint.hpp"
#include "topicsum/error.hpp"
#include "topicsum/io.hpp"
#include "topicsum/log.hpp"
#include "topicsum/parallel.hpp"
#include "topicsum/random.hpp"

namespace topicsum::embed {

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::kShape, "cosine: dimension mismatch " + std::to_string(a.dim()) +
                                       " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorKind::kDomain, "cosine: zero-norm vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

void validate(const EmbeddingProviderConfig& config) {
  if (config.kind == ProviderKind::kRemote) {
    if (config.endpoint.empty() || config.model_name.empty()) {
      throw Error(ErrorKind::kConfiguration, "remote embedding provider requires endpoint and model");
    }
    endpoint::parse_url(config.endpoint);
  } else if (config.dim == 0) {
    throw Error(ErrorKind::kConfiguration, "deterministic embedding provider requires dim > 0");
  }
  if (config.timeout_ms <= 0) throw Error(ErrorKind::kConfiguration, "timeout_ms must be positive");
  if (config.max_concurrency == 0) {
    throw Error(ErrorKind::kConfiguration, "max_concurrency must be positive");
  }
}

// ---------------------------------------------------------------------------

DeterministicProvider::DeterministicProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim == 0) throw Error(ErrorKind::kConfiguration, "deterministic provider requires dim > 0");
}

EmbeddingVector DeterministicProvider::embed_one(const std::string& phrase) const {
  Rng rng(stable_hash(phrase) ^ (seed_ * 0x9E3779B97F4A7C15ULL));
  EmbeddingVector v;
  v.values.resize(dim_);
  double norm2 = 0.0;
  // A draw of all zeros has probability zero, but keep the loop honest.
  while (norm2 == 0.0) {
    for (auto& x : v.values) {
      x = rng.normal();
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v.values) x *= inv;
  return v;
}

std::vector<EmbeddingVector> DeterministicProvider::embed(std::span<const std::string> phrases) {
  std::vector<EmbeddingVector> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(embed_one(p));
  return out;
}

std::string DeterministicProvider::identity() const {
  return "deterministic:dim=" + std::to_string(dim_) + ":seed=" + std::to_string(seed_);
}

// ---------------------------------------------------------------------------

RemoteProvider::RemoteProvider(EmbeddingProviderConfig config)
    : config_(std::move(config)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config_.max_concurrency))) {
  config_.kind = ProviderKind::kRemote;
  validate(config_);
  if (config_.batch_size == 0) config_.batch_size = 1;
}

std::string RemoteProvider::identity() const {
  return "remote:" + config_.endpoint + "#" + config_.model_name;
}

namespace {

EmbeddingVector vector_from_json(const io::Json& arr) {
  if (!arr.is_array()) throw Error(ErrorKind::kProtocol, "embedding is not an array");
  EmbeddingVector v;
  v.values.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) throw Error(ErrorKind::kProtocol, "embedding entry is not a number");
    v.values.push_back(x.get<double>());
  }
  return v;
}

std::vector<EmbeddingVector> vectors_from_reply(const io::Json& reply) {
  std::vector<EmbeddingVector> out;
  if (reply.is_array()) {
    for (const auto& row : reply) out.push_back(vector_from_json(row));
    return out;
  }
  if (reply.is_object()) {
    if (auto data = reply.find("data"); data != reply.end() && data->is_array()) {
      std::vector<std::pair<std::size_t, EmbeddingVector>> indexed;
      for (std::size_t i = 0; i < data->size(); ++i) {
        const auto& item = (*data)[i];
        if (!item.is_object() || !item.contains("embedding")) {
          throw Error(ErrorKind::kProtocol, "data item without 'embedding'");
        }
        std::size_t index = i;
        if (auto idx = item.find("index"); idx != item.end() && idx->is_number_unsigned()) {
          index = idx->get<std::size_t>();
        }
        indexed.emplace_back(index, vector_from_json(item["embedding"]));
      }
      std::stable_sort(indexed.begin(), indexed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [_, v] : indexed) out.push_back(std::move(v));
      return out;
    }
    if (auto emb = reply.find("embeddings"); emb != reply.end() && emb->is_array()) {
      for (const auto& row : *emb) out.push_back(vector_from_json(row));
      return out;
    }
  }
  throw Error(ErrorKind::kProtocol, "unrecognized embeddings reply shape");
}

}  // namespace

std::vector<EmbeddingVector> RemoteProvider::embed_batch(std::span<const std::string> batch) {
  endpoint::HttpSettings settings;
  settings.url = config_.endpoint;
  settings.bearer_token = config_.api_token;
  settings.timeout_ms = config_.timeout_ms;
  settings.max_attempts = config_.max_attempts;
  io::Json body = {{"model", config_.model_name},
                   {"input", std::vector<std::string>(batch.begin(), batch.end())}};
  in_flight_.acquire();
  io::Json reply;
  try {
    reply = endpoint::post_json(settings, body);
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();
  auto vectors = vectors_from_reply(reply);
  if (vectors.size() != batch.size()) {
    throw Error(ErrorKind::kProtocol, "embeddings reply has " + std::to_string(vectors.size()) +
                                          " vectors for " + std::to_string(batch.size()) +
                                          " inputs");
  }
  return vectors;
}

std::vector<EmbeddingVector> RemoteProvider::embed(std::span<const std::string> phrases) {
  const std::size_t batches = (phrases.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<std::vector<EmbeddingVector>> results(batches);
  parallel_for(batches, config_.max_concurrency, [&](std::size_t b) {
    const std::size_t begin = b * config_.batch_size;
    const std::size_t len = std::min(config_.batch_size, phrases.size() - begin);
    results[b] = embed_batch(phrases.subspan(begin, len));
  });
  std::vector<EmbeddingVector> out;
  out.reserve(phrases.size());
  for (auto& r : results) {
    for (auto& v : r) out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

CachedProvider::CachedProvider(std::shared_ptr<EmbeddingProvider> inner,
                               std::optional<std::filesystem::path> spill)
    : inner_(std::move(inner)), spill_(std::move(spill)) {
  if (!inner_) throw Error(ErrorKind::kConfiguration, "CachedProvider requires a provider");
  if (!spill_ || !std::filesystem::exists(*spill_)) return;
  const auto id = inner_->identity();
  io::for_each_jsonl_file(*spill_, [&](const io::Json& rec, std::size_t) {
    if (rec.value("provider", std::string()) != id) return true;
    auto phrase = rec.find("phrase");
    auto values = rec.find("values");
    if (phrase == rec.end() || !phrase->is_string() || values == rec.end()) return true;
    cache_.insert_or_assign(phrase->get<std::string>(), vector_from_json(*values));
    return true;
  });
}

std::vector<EmbeddingVector> CachedProvider::embed(std::span<const std::string> phrases) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    std::set<std::string_view> queued;
    for (const auto& p : phrases) {
      if (!cache_.contains(p) && queued.insert(p).second) missing.push_back(p);
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_->embed(missing);
    if (fresh.size() != missing.size()) {
      throw Error(ErrorKind::kProtocol, "provider returned a wrong number of vectors");
    }
    std::lock_guard lock(mu_);
    std::ofstream spill_out;
    if (spill_) spill_out.open(*spill_, std::ios::app);
    for (std::size_t i = 0; i < missing.size(); ++i) {
      // A concurrent caller may have filled the slot; keep the first vector
      // so identical phrases always map to identical vectors.
      auto [it, inserted] = cache_.emplace(missing[i], std::move(fresh[i]));
      if (inserted) {
        ++misses_;
        if (spill_out) {
          io::Json rec = {{"provider", inner_->identity()},
                          {"phrase", missing[i]},
                          {"values", it->second.values}};
          spill_out << rec.dump() << '\n';
        }
      }
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(phrases.size());
  std::lock_guard lock(mu_);
  for (const auto& p : phrases) out.push_back(cache_.find(p)->second);
  return out;
}

std::size_t CachedProvider::cached_count() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::size_t CachedProvider::miss_count() const {
  std::lock_guard lock(mu_);
  return misses_;
}

std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
  validate(config);
  std::shared_ptr<EmbeddingProvider> inner;
  if (config.kind == ProviderKind::kRemote) {
    inner = std::make_shared<RemoteProvider>(config);
  } else {
    inner = std::make_shared<DeterministicProvider>(config.dim, config.seed);
  }
  return std::make_shared<CachedProvider>(std::move(inner), config.cache_path);
}

std::vector<EmbeddingVector> embed_phrases(EmbeddingProvider& provider,
                                           std::span<const std::string> phrases) {
  if (phrases.empty()) throw Error(ErrorKind::kPrecondition, "embed_phrases: no phrases");
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (io::is_blank(phrases[i])) {
      throw Error(ErrorKind::kPrecondition,
                  "embed_phrases: phrase " + std::to_string(i) + " is empty");
    }
  }
  auto out = provider.embed(phrases);
  if (out.size() != phrases.size()) {
    throw Error(ErrorKind::kProtocol, "provider returned " + std::to_string(out.size()) +
                                          " vectors for " + std::to_string(phrases.size()) +
                                          " phrases");
  }
  const std::size_t dim = out.front().dim();
  for (const auto& v : out) {
    if (v.dim() != dim || dim == 0) {
      throw Error(ErrorKind::kProtocol, "dimension mismatch within an embedding batch");
    }
    for (double x : v.values) {
      if (!std::isfinite(x)) throw Error(ErrorKind::kProtocol, "non-finite embedding entry");
    }
    if (!(v.norm() > 0.0)) throw Error(ErrorKind::kProtocol, "zero-norm embedding");
  }
  return out;
}

}  // namespace topicsum::embed
