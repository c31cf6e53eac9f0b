// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topicsum/error.hpp"
#include "topicsum/log.hpp"
#include "topicsum/textmetrics.hpp"

namespace topicsum::rewards {

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::kTopic: return "topic";
    case RewardKind::kLength: return "len";
    case RewardKind::kRouge: return "rouge";
  }
  return "unknown";
}

RewardKind parse_reward_kind(std::string_view name) {
  if (name == "topic") return RewardKind::kTopic;
  if (name == "len" || name == "length") return RewardKind::kLength;
  if (name == "rouge") return RewardKind::kRouge;
  throw Error(ErrorKind::kConfiguration, "unknown reward kind '" + std::string(name) + "'");
}

std::string_view to_string(TopicMode mode) {
  switch (mode) {
    case TopicMode::kF1: return "f1";
    case TopicMode::kCoverageOnly: return "coverage-only";
    case TopicMode::kPrecisionOnly: return "precision-only";
  }
  return "unknown";
}

TopicMode parse_topic_mode(std::string_view name) {
  if (name == "f1") return TopicMode::kF1;
  if (name == "coverage-only") return TopicMode::kCoverageOnly;
  if (name == "precision-only") return TopicMode::kPrecisionOnly;
  throw Error(ErrorKind::kConfiguration, "unknown topic mode '" + std::string(name) + "'");
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, std::size_t m, std::vector<double> values)
    : rows(n), cols(m), entries(std::move(values)) {
  if (n == 0 || m == 0) throw Error(ErrorKind::kShape, "similarity matrix must be non-empty");
  if (entries.size() != n * m) throw Error(ErrorKind::kShape, "similarity matrix size mismatch");
}

SimilarityMatrix SimilarityMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::kShape, "similarity matrix must be non-empty");
  std::vector<double> values;
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) throw Error(ErrorKind::kShape, "ragged matrix rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return SimilarityMatrix(rows.size(), rows.front().size(), std::move(values));
}

SimilarityMatrix SimilarityMatrix::transpose() const {
  std::vector<double> t(entries.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = at(i, j);
  }
  return SimilarityMatrix(cols, rows, std::move(t));
}

SimilarityMatrix similarity_matrix(std::span<const embed::EmbeddingVector> doc_topics,
                                   std::span<const embed::EmbeddingVector> sum_topics) {
  if (doc_topics.empty() || sum_topics.empty()) {
    throw Error(ErrorKind::kPrecondition, "similarity_matrix: empty topic list");
  }
  std::vector<double> values;
  values.reserve(doc_topics.size() * sum_topics.size());
  for (const auto& d : doc_topics) {
    for (const auto& s : sum_topics) values.push_back(embed::cosine(d, s));
  }
  return SimilarityMatrix(doc_topics.size(), sum_topics.size(), std::move(values));
}

double harmonic_mean(double coverage, double precision) {
  const double c = std::max(coverage, 0.0);
  const double p = std::max(precision, 0.0);
  if (c + p <= 0.0) return 0.0;
  return 2.0 * c * p / (c + p);
}

TopicPairScore pair_score(const SimilarityMatrix& m, TopicMode mode) {
  if (m.rows == 0 || m.cols == 0) throw Error(ErrorKind::kShape, "pair_score: empty matrix");
  std::vector<double> col_max(m.cols, -std::numeric_limits<double>::infinity());
  double row_sum = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double v = m.at(i, j);
      row_max = std::max(row_max, v);
      col_max[j] = std::max(col_max[j], v);
    }
    row_sum += row_max;
  }
  double col_sum = 0.0;
  for (double v : col_max) col_sum += v;

  TopicPairScore s;
  s.coverage = row_sum / static_cast<double>(m.rows);
  s.precision = col_sum / static_cast<double>(m.cols);
  switch (mode) {
    case TopicMode::kF1: s.harmonic = harmonic_mean(s.coverage, s.precision); break;
    case TopicMode::kCoverageOnly: s.harmonic = s.coverage; break;
    case TopicMode::kPrecisionOnly: s.harmonic = s.precision; break;
  }
  return s;
}

std::vector<TopicPairScore> pair_scores(const corpus::DocumentSet& set,
                                        const TopicList& summary_topics,
                                        embed::EmbeddingProvider& provider, TopicMode mode) {
  if (!set.doc_topics || set.doc_topics->size() != set.doc_count()) {
    throw Error(ErrorKind::kPrecondition,
                "record '" + set.id + "': doc_topics missing for some documents");
  }
  if (summary_topics.phrases.empty()) {
    throw Error(ErrorKind::kPrecondition, "record '" + set.id + "': no summary topics");
  }
  std::vector<std::string> phrases;
  std::vector<std::size_t> offsets;
  for (const auto& list : *set.doc_topics) {
    if (list.phrases.empty()) {
      throw Error(ErrorKind::kPrecondition, "record '" + set.id + "': empty document topic list");
    }
    offsets.push_back(phrases.size());
    phrases.insert(phrases.end(), list.phrases.begin(), list.phrases.end());
  }
  const std::size_t summary_offset = phrases.size();
  phrases.insert(phrases.end(), summary_topics.phrases.begin(), summary_topics.phrases.end());

  const auto vectors = embed::embed_phrases(provider, phrases);
  const std::span<const embed::EmbeddingVector> all(vectors);
  const auto summary_vecs = all.subspan(summary_offset);

  std::vector<TopicPairScore> out;
  out.reserve(set.doc_count());
  for (std::size_t k = 0; k < set.doc_count(); ++k) {
    const auto doc_vecs = all.subspan(offsets[k], (*set.doc_topics)[k].size());
    out.push_back(pair_score(similarity_matrix(doc_vecs, summary_vecs), mode));
  }
  return out;
}

TopicReward topic_reward(const corpus::DocumentSet& set, std::string_view summary,
                         topics::TopicExtractor& extractor, embed::EmbeddingProvider& provider,
                         std::size_t m, TopicMode mode) {
  if (!set.doc_topics || set.doc_topics->size() != set.doc_count()) {
    throw Error(ErrorKind::kPrecondition,
                "record '" + set.id + "': doc_topics missing for some documents");
  }
  TopicReward out;
  try {
    out.summary_topics =
        topics::extract_topics(extractor, summary, m, TopicSource::kSummary).topics;
  } catch (const Error& e) {
    throw Error(ErrorKind::kReward,
                "record '" + set.id + "': summary topic extraction failed: " + e.what());
  }
  out.per_pair = pair_scores(set, out.summary_topics, provider, mode);
  double sum = 0.0;
  for (const auto& p : out.per_pair) sum += p.harmonic;
  out.r_topic = sum / static_cast<double>(out.per_pair.size());
  return out;
}

double length_reward(std::size_t l_sum, std::size_t l_exp) {
  if (l_exp == 0) throw Error(ErrorKind::kDomain, "length_reward: expected length must be >= 1");
  const double diff = std::fabs(static_cast<double>(l_exp) - static_cast<double>(l_sum));
  return std::exp(-diff / static_cast<double>(l_exp));
}

double length_reward(std::string_view summary, const LengthConfig& cfg) {
  return length_reward(count_tokens(summary, cfg.tokenizer_id), cfg.expected_tokens);
}

std::size_t estimate_expected_length(std::span<const corpus::DocumentSet> validation,
                                     std::string_view tokenizer_id) {
  if (validation.empty()) {
    throw Error(ErrorKind::kEmptyInput, "estimate_expected_length: empty validation set");
  }
  double total = 0.0;
  for (const auto& set : validation) {
    if (!set.reference) {
      throw Error(ErrorKind::kConfiguration,
                  "record '" + set.id + "' has no reference for length estimation");
    }
    total += static_cast<double>(count_tokens(*set.reference, tokenizer_id));
  }
  const auto l = static_cast<std::size_t>(std::llround(total / static_cast<double>(validation.size())));
  return std::max<std::size_t>(l, 1);
}

double default_factor(RewardKind kind) { return kind == RewardKind::kTopic ? 2.0 : 1.0; }

RewardMap normalize_weights(const WeightingConfig& cfg) {
  if (cfg.sigmas.empty()) throw Error(ErrorKind::kConfiguration, "no active rewards to weight");
  RewardMap raw;
  double total = 0.0;
  for (const auto& [kind, sigma] : cfg.sigmas) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorKind::kDomain, "sigma for '" + std::string(to_string(kind)) +
                                          "' must be positive and finite");
    }
    const auto f = cfg.factors.find(kind);
    const double factor = f == cfg.factors.end() ? default_factor(kind) : f->second;
    if (!(factor > 0.0) || !std::isfinite(factor)) {
      throw Error(ErrorKind::kDomain, "factor for '" + std::string(to_string(kind)) +
                                          "' must be positive and finite");
    }
    raw[kind] = factor / sigma;
    total += raw[kind];
  }
  for (auto& [_, w] : raw) w /= total;
  return raw;
}

double population_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

RewardMap estimate_sigmas(const std::map<RewardKind, std::vector<double>>& samples) {
  RewardMap out;
  for (const auto& [kind, values] : samples) {
    out[kind] = std::max(population_std(values), kSigmaFloor);
  }
  return out;
}

double total_reward(const RewardMap& components, const RewardMap& weights) {
  if (components.size() != weights.size()) {
    throw Error(ErrorKind::kConfiguration, "reward components and weights cover different kinds");
  }
  double total = 0.0;
  for (const auto& [kind, value] : components) {
    const auto w = weights.find(kind);
    if (w == weights.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "no weight for reward '" + std::string(to_string(kind)) + "'");
    }
    total += w->second * value;
  }
  return total;
}

bool RewardPreset::uses(RewardKind kind) const {
  return std::find(active.begin(), active.end(), kind) != active.end();
}

RewardPreset preset(std::string_view name) {
  using enum RewardKind;
  RewardPreset p;
  p.name = std::string(name);
  if (name == "topic+len") {
    p.active = {kTopic, kLength};
    p.factors = {{kTopic, 2.0}, {kLength, 1.0}};
  } else if (name == "topic+rouge+len") {
    p.active = {kTopic, kRouge, kLength};
    p.factors = {{kTopic, 2.0}, {kRouge, 2.0}, {kLength, 1.0}};
  } else if (name == "rouge+len") {
    p.active = {kRouge, kLength};
    p.factors = {{kRouge, 1.0}, {kLength, 1.0}};
  } else if (name == "topic+rouge") {
    p.active = {kTopic, kRouge};
    p.factors = {{kTopic, 1.0}, {kRouge, 1.0}};
  } else if (name == "topic") {
    p.active = {kTopic};
    p.factors = {{kTopic, 1.0}};
  } else if (name == "coverage-only" || name == "precision-only") {
    p.active = {kTopic, kLength};
    p.factors = {{kTopic, 2.0}, {kLength, 1.0}};
    p.mode = parse_topic_mode(name);
  } else {
    throw Error(ErrorKind::kConfiguration, "unknown reward preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"topic+len", "topic+rouge+len", "rouge+len", "topic+rouge",
          "topic",     "coverage-only",   "precision-only"};
}

RewardMap RewardBreakdown::components() const {
  RewardMap out;
  if (r_topic_mean) out[RewardKind::kTopic] = *r_topic_mean;
  if (r_len) out[RewardKind::kLength] = *r_len;
  if (r_rouge) out[RewardKind::kRouge] = *r_rouge;
  return out;
}

io::Json to_json(const RewardBreakdown& b) {
  io::Json j = io::Json::object();
  if (b.r_topic_mean) {
    io::Json pairs = io::Json::array();
    for (const auto& p : b.per_pair) {
      pairs.push_back({{"coverage", p.coverage}, {"precision", p.precision}, {"harmonic", p.harmonic}});
    }
    j["per_pair"] = std::move(pairs);
    j["r_topic"] = *b.r_topic_mean;
    j["summary_topics"] = b.summary_topics;
  }
  if (b.r_len) j["r_len"] = *b.r_len;
  if (b.r_rouge) j["r_rouge"] = *b.r_rouge;
  io::Json weights = io::Json::object();
  for (const auto& [kind, w] : b.weights) weights[std::string(to_string(kind))] = w;
  j["weights"] = std::move(weights);
  j["r_total"] = b.r_total;
  return j;
}

// ---------------------------------------------------------------------------

RewardScorer::RewardScorer(std::shared_ptr<topics::TopicExtractor> extractor,
                           std::shared_ptr<embed::EmbeddingProvider> provider,
                           ScorerConfig config)
    : extractor_(std::move(extractor)), provider_(std::move(provider)), config_(std::move(config)) {
  if (config_.preset.active.empty()) {
    throw Error(ErrorKind::kConfiguration, "reward preset has no active rewards");
  }
  if (config_.preset.uses(RewardKind::kTopic) && (!extractor_ || !provider_)) {
    throw Error(ErrorKind::kConfiguration, "topic reward needs an extractor and a provider");
  }
  if (config_.summary_topic_count == 0) {
    throw Error(ErrorKind::kConfiguration, "summary topic count must be >= 1");
  }
  if (config_.length.expected_tokens == 0) {
    throw Error(ErrorKind::kConfiguration, "expected length must be >= 1");
  }
}

TopicReward RewardScorer::topic_reward(const corpus::DocumentSet& set, std::string_view summary,
                                       TopicMode mode) const {
  if (!extractor_ || !provider_) {
    throw Error(ErrorKind::kConfiguration, "topic reward needs an extractor and a provider");
  }
  return rewards::topic_reward(set, summary, *extractor_, *provider_,
                               config_.summary_topic_count, mode);
}

RewardMap RewardScorer::components(const corpus::DocumentSet& set,
                                   std::string_view summary) const {
  RewardMap out;
  for (auto kind : config_.preset.active) {
    switch (kind) {
      case RewardKind::kTopic:
        out[kind] = topic_reward(set, summary, config_.preset.mode).r_topic;
        break;
      case RewardKind::kLength:
        out[kind] = length_reward(summary, config_.length);
        break;
      case RewardKind::kRouge:
        if (!set.reference) {
          throw Error(ErrorKind::kConfiguration,
                      "record '" + set.id + "': rouge reward needs a reference");
        }
        out[kind] = textmetrics::rouge_reward(summary, *set.reference);
        break;
    }
  }
  return out;
}

RewardBreakdown RewardScorer::score(const corpus::DocumentSet& set,
                                    std::string_view summary) const {
  WeightingConfig wc;
  wc.factors = config_.preset.factors;
  wc.mode = config_.preset.mode;
  for (auto kind : config_.preset.active) {
    const auto s = config_.sigmas.find(kind);
    if (s == config_.sigmas.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "no sigma for reward '" + std::string(to_string(kind)) + "'");
    }
    wc.sigmas[kind] = s->second;
  }

  RewardBreakdown b;
  b.weights = normalize_weights(wc);
  for (auto kind : config_.preset.active) {
    switch (kind) {
      case RewardKind::kTopic: {
        auto t = topic_reward(set, summary, config_.preset.mode);
        b.r_topic_mean = t.r_topic;
        b.per_pair = std::move(t.per_pair);
        b.summary_topics = std::move(t.summary_topics.phrases);
        break;
      }
      case RewardKind::kLength:
        b.r_len = length_reward(summary, config_.length);
        break;
      case RewardKind::kRouge:
        if (!set.reference) {
          throw Error(ErrorKind::kConfiguration,
                      "record '" + set.id + "': rouge reward needs a reference");
        }
        b.r_rouge = textmetrics::rouge_reward(summary, *set.reference);
        break;
    }
  }
  b.r_total = total_reward(b.components(), b.weights);
  return b;
}

RewardMap RewardScorer::estimate_sigmas(
    std::span<const corpus::DocumentSet> batch,
    const std::function<std::string(const corpus::DocumentSet&)>& sampler) const {
  if (batch.empty()) throw Error(ErrorKind::kEmptyInput, "estimate_sigmas: empty batch");
  std::map<RewardKind, std::vector<double>> samples;
  for (auto kind : config_.preset.active) samples[kind];
  for (const auto& set : batch) {
    try {
      for (const auto& [kind, v] : components(set, sampler(set))) samples[kind].push_back(v);
    } catch (const Error& e) {
      log::warn("sigma_sample_skipped", {{"id", set.id}, {"error", e.what()}});
    }
  }
  auto sigmas = rewards::estimate_sigmas(samples);
  io::Json fields = io::Json::object();
  for (const auto& [kind, s] : sigmas) fields[std::string(to_string(kind))] = s;
  log::info("sigmas_estimated", {{"batch", batch.size()}, {"sigmas", fields}});
  return sigmas;
}

}  // namespace topicsum::rewards
