// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/evalharness.hpp"

#include "topicsum/error.hpp"
#include "topicsum/log.hpp"
#include "topicsum/parallel.hpp"

namespace topicsum::evalharness {

std::string_view to_string(FailureReason reason) {
  return reason == FailureReason::kOverlong ? "overlong" : "repetitive";
}

namespace {

bool has_periodic_stretch(std::span<const std::string_view> tokens) {
  for (std::size_t p = 1; p <= kRepeatPeriodMax; ++p) {
    // A periodic stretch of length L with period p is a run of L - p
    // positions where tokens[i] == tokens[i - p].
    const std::size_t needed = kRepeatSpan - p;
    std::size_t run = 0;
    for (std::size_t i = p; i < tokens.size(); ++i) {
      run = tokens[i] == tokens[i - p] ? run + 1 : 0;
      if (run >= needed) return true;
    }
  }
  return false;
}

}  // namespace

FailureCheck detect_failure(std::string_view summary, std::size_t token_limit) {
  const auto tokens = whitespace_split(summary);
  if (tokens.size() > token_limit) return {true, FailureReason::kOverlong};
  const std::span<const std::string_view> tail =
      std::span<const std::string_view>(tokens).subspan(tokens.size() / 2);
  if (has_periodic_stretch(tail)) return {true, FailureReason::kRepetitive};
  return {};
}

Alignment alignment_from_pairs(std::span<const rewards::TopicPairScore> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::kPrecondition, "alignment needs at least one pair");
  Alignment a;
  for (const auto& p : pairs) {
    a.cov_ratio += p.coverage;
    a.pre_ratio += p.precision;
  }
  a.cov_ratio /= static_cast<double>(pairs.size());
  a.pre_ratio /= static_cast<double>(pairs.size());
  a.topic_f1 = rewards::harmonic_mean(a.cov_ratio, a.pre_ratio);
  return a;
}

Alignment topic_alignment_eval(const corpus::DocumentSet& set, std::string_view summary,
                               topics::TopicExtractor& extractor,
                               embed::EmbeddingProvider& provider, std::size_t m) {
  const auto reward =
      rewards::topic_reward(set, summary, extractor, provider, m, rewards::TopicMode::kF1);
  return alignment_from_pairs(reward.per_pair);
}

Aggregate aggregate(std::span<const RecordRow> rows) {
  Aggregate agg;
  agg.count = rows.size();
  if (rows.empty()) return agg;
  double cov = 0, pre = 0, f1 = 0, r1 = 0, r2 = 0, rl = 0, rm = 0, len = 0;
  std::size_t n_topic = 0;
  std::size_t n_rouge = 0;
  std::size_t flagged = 0;
  for (const auto& row : rows) {
    if (row.alignment) {
      cov += row.alignment->cov_ratio;
      pre += row.alignment->pre_ratio;
      f1 += row.alignment->topic_f1;
      ++n_topic;
    }
    if (row.rouge) {
      r1 += row.rouge->r1;
      r2 += row.rouge->r2;
      rl += row.rouge->rl;
      rm += row.rouge->rm;
      ++n_rouge;
    }
    len += static_cast<double>(row.length_tokens);
    if (row.failure_flag) ++flagged;
  }
  if (n_topic > 0) {
    const auto n = static_cast<double>(n_topic);
    agg.cov_ratio = cov / n;
    agg.pre_ratio = pre / n;
    agg.topic_f1 = f1 / n;
  }
  if (n_rouge > 0) {
    const auto n = static_cast<double>(n_rouge);
    agg.rouge1 = r1 / n;
    agg.rouge2 = r2 / n;
    agg.rougeL = rl / n;
    agg.rougeM = rm / n;
  }
  const auto n = static_cast<double>(rows.size());
  agg.length_tokens = len / n;
  agg.failure_rate = static_cast<double>(flagged) / n;
  return agg;
}

EvalReport evaluate(std::span<const corpus::DocumentSet> dataset,
                    const std::map<std::string, std::string>& summaries, const EvalConfig& cfg,
                    topics::TopicExtractor* extractor, embed::EmbeddingProvider* provider) {
  if (cfg.topic && (extractor == nullptr || provider == nullptr)) {
    throw Error(ErrorKind::kConfiguration, "topic metrics need an extractor and a provider");
  }
  EvalReport report;
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (summaries.contains(dataset[i].id)) {
      present.push_back(i);
    } else {
      report.missing_ids.push_back(dataset[i].id);
    }
  }

  std::vector<std::optional<RecordRow>> rows(present.size());
  std::vector<std::string> errors(present.size());
  parallel_for(present.size(), cfg.max_workers, [&](std::size_t j) {
    const auto& set = dataset[present[j]];
    const std::string& summary = summaries.at(set.id);
    try {
      RecordRow row;
      row.id = set.id;
      row.doc_count = set.doc_count();
      row.length_tokens = count_tokens(summary, cfg.tokenizer_id);
      const auto check = detect_failure(summary, cfg.token_limit);
      row.failure_flag = check.flagged;
      row.failure_reason = check.reason;
      if (cfg.topic) {
        row.alignment =
            topic_alignment_eval(set, summary, *extractor, *provider, cfg.summary_topic_count);
      }
      if (cfg.rouge && set.reference) {
        row.rouge = textmetrics::rouge_scores(summary, *set.reference);
      }
      rows[j] = std::move(row);
    } catch (const Error& e) {
      errors[j] = e.what();
    }
  });

  for (std::size_t j = 0; j < present.size(); ++j) {
    if (rows[j]) {
      report.per_record.push_back(std::move(*rows[j]));
    } else {
      const auto& id = dataset[present[j]].id;
      report.errors.push_back({id, errors[j]});
      log::warn("eval_record_failed", {{"id", id}, {"error", errors[j]}});
    }
  }
  report.aggregates = aggregate(report.per_record);
  report.failure_rate = report.aggregates.failure_rate;
  std::map<std::size_t, std::vector<RecordRow>> groups;
  for (const auto& row : report.per_record) groups[row.doc_count].push_back(row);
  for (const auto& [k, group] : groups) report.by_doc_count[k] = aggregate(group);
  return report;
}

namespace {

void put_optional(io::Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

io::Json aggregate_json(const Aggregate& a) {
  io::Json j = {{"count", a.count}};
  put_optional(j, "cov_ratio", a.cov_ratio);
  put_optional(j, "pre_ratio", a.pre_ratio);
  put_optional(j, "topic_f1", a.topic_f1);
  put_optional(j, "rouge1", a.rouge1);
  put_optional(j, "rouge2", a.rouge2);
  put_optional(j, "rougeL", a.rougeL);
  put_optional(j, "rougeM", a.rougeM);
  j["length_tokens"] = a.length_tokens;
  j["failure_rate"] = a.failure_rate;
  return j;
}

}  // namespace

io::Json to_json(const EvalReport& report) {
  io::Json rows = io::Json::array();
  for (const auto& r : report.per_record) {
    io::Json row = {{"id", r.id}, {"doc_count", r.doc_count}};
    if (r.alignment) {
      row["cov_ratio"] = r.alignment->cov_ratio;
      row["pre_ratio"] = r.alignment->pre_ratio;
      row["topic_f1"] = r.alignment->topic_f1;
    }
    if (r.rouge) {
      row["rouge"] = {{"rouge1", r.rouge->r1},
                      {"rouge2", r.rouge->r2},
                      {"rougeL", r.rouge->rl},
                      {"rougeM", r.rouge->rm}};
    }
    row["length_tokens"] = r.length_tokens;
    row["failure_flag"] = r.failure_flag;
    row["failure_reason"] =
        r.failure_reason ? io::Json(std::string(to_string(*r.failure_reason))) : io::Json(nullptr);
    rows.push_back(std::move(row));
  }
  io::Json by_k = io::Json::object();
  for (const auto& [k, agg] : report.by_doc_count) by_k[std::to_string(k)] = aggregate_json(agg);
  io::Json errors = io::Json::array();
  for (const auto& e : report.errors) errors.push_back({{"id", e.id}, {"error", e.error}});
  return {{"per_record", std::move(rows)},
          {"aggregates", aggregate_json(report.aggregates)},
          {"by_doc_count", std::move(by_k)},
          {"failure_rate", report.failure_rate},
          {"missing_count", report.missing_ids.size()},
          {"missing_ids", report.missing_ids},
          {"error_count", report.errors.size()},
          {"errors", std::move(errors)}};
}

}  // namespace topicsum::evalharness
