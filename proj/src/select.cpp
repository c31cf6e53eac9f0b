// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/select.hpp"

#include "topicsum/error.hpp"
#include "topicsum/log.hpp"
#include "topicsum/parallel.hpp"

namespace topicsum::select {

io::Json to_json(const Selection& selection) {
  io::Json scores = io::Json::array();
  for (const auto& s : selection.scores) {
    io::Json row = {{"index", s.index}};
    row["score"] = s.score ? io::Json(*s.score) : io::Json(nullptr);
    if (s.error) row["error"] = *s.error;
    scores.push_back(std::move(row));
  }
  io::Json j = {{"id", selection.id},
                {"winner_index", selection.winner_index},
                {"summary", selection.winner},
                {"score", selection.winner_score},
                {"scores", std::move(scores)}};
  if (!selection.warnings.empty()) j["warnings"] = selection.warnings;
  return j;
}

std::optional<std::size_t> argmax_first(std::span<const std::optional<double>> scores) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    if (!best || *scores[i] > *scores[*best]) best = i;
  }
  return best;
}

Selection best_of_n(const corpus::DocumentSet& set, std::span<const std::string> candidates,
                    const rewards::RewardScorer& scorer, SelectMetric metric,
                    std::size_t max_workers) {
  if (candidates.empty()) {
    throw Error(ErrorKind::kPrecondition, "record '" + set.id + "': no candidates");
  }
  if (!set.doc_topics) {
    throw Error(ErrorKind::kPrecondition, "record '" + set.id + "': doc_topics missing");
  }
  Selection sel;
  sel.id = set.id;
  sel.scores.resize(candidates.size());
  parallel_for(candidates.size(), max_workers, [&](std::size_t i) {
    auto& slot = sel.scores[i];
    slot.index = i;
    try {
      slot.score = metric == SelectMetric::kTopicF1
                       ? scorer.topic_reward(set, candidates[i], rewards::TopicMode::kF1).r_topic
                       : scorer.score(set, candidates[i]).r_total;
    } catch (const Error& e) {
      slot.error = e.what();
    }
  });

  std::vector<std::optional<double>> values;
  for (const auto& s : sel.scores) {
    values.push_back(s.score);
    if (s.error) {
      sel.warnings.push_back("candidate " + std::to_string(s.index) + ": " + *s.error);
      log::warn("candidate_excluded",
                {{"id", set.id}, {"candidate", s.index}, {"error", *s.error}});
    }
  }
  const auto best = argmax_first(values);
  if (!best) {
    throw Error(ErrorKind::kSelection,
                "record '" + set.id + "': scoring failed for every candidate");
  }
  sel.winner_index = *best;
  sel.winner = candidates[*best];
  sel.winner_score = *values[*best];
  return sel;
}

}  // namespace topicsum::select
