// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topicsum/error.hpp"
#include "topicsum/log.hpp"

namespace topicsum::grpo {

void validate(const GrpoConfig& cfg) {
  if (cfg.group_size < 2) throw Error(ErrorKind::kConfiguration, "group_size must be >= 2");
  if (!(cfg.clip_epsilon > 0.0 && cfg.clip_epsilon < 1.0)) {
    throw Error(ErrorKind::kConfiguration, "clip_epsilon must be in (0, 1)");
  }
  if (!(cfg.kl_coef >= 0.0) || !std::isfinite(cfg.kl_coef)) {
    throw Error(ErrorKind::kConfiguration, "kl_coef must be >= 0");
  }
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw Error(ErrorKind::kConfiguration, "learning_rate must be positive");
  }
  if (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature)) {
    throw Error(ErrorKind::kConfiguration, "temperature must be positive");
  }
  if (cfg.steps == 0) throw Error(ErrorKind::kConfiguration, "steps must be >= 1");
}

std::vector<double> group_advantage(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorKind::kPrecondition, "group_advantage needs at least two rewards");
  }
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  // Identical rewards give exact zeros; rounding in the mean would otherwise
  // be amplified by the guard.
  if (std::ranges::all_of(rewards, [&](double r) { return r == rewards[0]; })) {
    return std::vector<double>(rewards.size(), 0.0);
  }
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double denom = std::sqrt(ss / n) + kAdvantageEpsilon;
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / denom);
  return out;
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  if (logits.empty()) throw Error(ErrorKind::kShape, "softmax of an empty vector");
  double hi = -std::numeric_limits<double>::infinity();
  for (double z : logits) hi = std::max(hi, z / temperature);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] / temperature - hi);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorKind::kShape, "log_softmax of an empty vector");
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - hi);
  const double lse = hi + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

double categorical_kl(std::span<const double> p_logits, std::span<const double> ref_logits) {
  if (p_logits.size() != ref_logits.size()) {
    throw Error(ErrorKind::kShape, "categorical_kl: length mismatch");
  }
  const auto lp = log_softmax(p_logits);
  const auto lq = log_softmax(ref_logits);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lq[i]);
  return std::max(kl, 0.0);
}

void validate(const CompletionGroup& group) {
  const std::size_t g = group.completions.size();
  if (g < 2 || group.rewards.size() != g || group.logprob_new.size() != g ||
      group.logprob_old.size() != g) {
    throw Error(ErrorKind::kShape, "completion group '" + group.instance_id +
                                       "' needs G >= 2 entries in every list");
  }
  for (std::size_t i = 0; i < g; ++i) {
    for (double lp : {group.logprob_new[i], group.logprob_old[i]}) {
      if (!std::isfinite(lp) || lp > 0.0) {
        throw Error(ErrorKind::kDomain, "completion " + std::to_string(i) +
                                            " has an invalid log-probability");
      }
    }
  }
}

double surrogate_objective(std::span<const double> logprob_new,
                           std::span<const double> logprob_old,
                           std::span<const double> advantages, double clip_epsilon,
                           double kl_coef, double kl) {
  const std::size_t g = advantages.size();
  if (g == 0 || logprob_new.size() != g || logprob_old.size() != g) {
    throw Error(ErrorKind::kShape, "surrogate_objective: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double r = std::exp(logprob_new[i] - logprob_old[i]);
    if (!std::isfinite(r)) {
      throw Error(ErrorKind::kNumeric, "non-finite ratio for completion " + std::to_string(i));
    }
    const double clipped = std::clamp(r, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    sum += std::min(r * advantages[i], clipped * advantages[i]);
  }
  return sum / static_cast<double>(g) - kl_coef * kl;
}

double surrogate_objective(const CompletionGroup& group, std::span<const double> advantages,
                           const GrpoConfig& cfg, double kl) {
  return surrogate_objective(group.logprob_new, group.logprob_old, advantages, cfg.clip_epsilon,
                             cfg.kl_coef, kl);
}

namespace {

void check_instance(std::span<const double> logits, std::span<const double> old_logits,
                    std::span<const double> ref_logits, std::span<const std::size_t> samples,
                    std::span<const double> advantages) {
  if (logits.empty() || old_logits.size() != logits.size() ||
      ref_logits.size() != logits.size()) {
    throw Error(ErrorKind::kShape, "policy logits have mismatched lengths");
  }
  if (samples.empty() || samples.size() != advantages.size()) {
    throw Error(ErrorKind::kShape, "samples and advantages differ in length");
  }
  for (auto c : samples) {
    if (c >= logits.size()) {
      throw Error(ErrorKind::kLookup, "sample index " + std::to_string(c) + " outside the pool");
    }
  }
}

}  // namespace

double instance_objective(std::span<const double> logits, std::span<const double> old_logits,
                          std::span<const double> ref_logits, std::span<const std::size_t> samples,
                          std::span<const double> advantages, const GrpoConfig& cfg) {
  check_instance(logits, old_logits, ref_logits, samples, advantages);
  const auto lp = log_softmax(logits);
  const auto lp_old = log_softmax(old_logits);
  std::vector<double> lp_new_g;
  std::vector<double> lp_old_g;
  for (auto c : samples) {
    lp_new_g.push_back(lp[c]);
    lp_old_g.push_back(lp_old[c]);
  }
  const double kl = cfg.kl_coef > 0.0 ? categorical_kl(logits, ref_logits) : 0.0;
  return surrogate_objective(lp_new_g, lp_old_g, advantages, cfg.clip_epsilon, cfg.kl_coef, kl);
}

std::vector<double> policy_gradient(std::span<const double> logits,
                                    std::span<const double> old_logits,
                                    std::span<const double> ref_logits,
                                    std::span<const std::size_t> samples,
                                    std::span<const double> advantages, const GrpoConfig& cfg) {
  check_instance(logits, old_logits, ref_logits, samples, advantages);
  const std::size_t k = logits.size();
  const auto lp = log_softmax(logits);
  const auto lp_old = log_softmax(old_logits);
  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = std::exp(lp[i]);

  std::vector<double> grad(k, 0.0);
  const auto g = static_cast<double>(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::size_t c = samples[s];
    const double a = advantages[s];
    const double r = std::exp(lp[c] - lp_old[c]);
    if (!std::isfinite(r)) {
      throw Error(ErrorKind::kNumeric, "non-finite ratio for completion " + std::to_string(s));
    }
    const double clipped = std::clamp(r, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    if (r * a > clipped * a) continue;  // clipped branch: constant in theta
    // d r / d theta = r (e_c - p)
    const double scale = a * r / g;
    for (std::size_t i = 0; i < k; ++i) grad[i] -= scale * p[i];
    grad[c] += scale;
  }

  if (cfg.kl_coef > 0.0) {
    const auto lq = log_softmax(ref_logits);
    double kl = 0.0;
    for (std::size_t i = 0; i < k; ++i) kl += p[i] * (lp[i] - lq[i]);
    for (std::size_t i = 0; i < k; ++i) {
      grad[i] -= cfg.kl_coef * p[i] * (lp[i] - lq[i] - kl);
    }
  }
  return grad;
}

std::vector<std::size_t> completion_indices(std::span<const std::string> pool,
                                            std::span<const std::string> completions) {
  std::vector<std::size_t> out;
  out.reserve(completions.size());
  for (const auto& c : completions) {
    const auto it = std::find(pool.begin(), pool.end(), c);
    if (it == pool.end()) throw Error(ErrorKind::kLookup, "completion not in candidate pool");
    out.push_back(static_cast<std::size_t>(it - pool.begin()));
  }
  return out;
}

std::vector<double> PolicySnapshot::probabilities(std::size_t instance) const {
  return softmax(logits.at(instance));
}

void validate(const PolicySnapshot& snapshot) {
  if (snapshot.ids.size() != snapshot.pools.size() ||
      snapshot.pools.size() != snapshot.logits.size()) {
    throw Error(ErrorKind::kShape, "policy snapshot has mismatched instance lists");
  }
  for (std::size_t i = 0; i < snapshot.pools.size(); ++i) {
    if (snapshot.pools[i].empty()) {
      throw Error(ErrorKind::kValidation, "instance '" + snapshot.ids[i] + "' has an empty pool");
    }
    if (snapshot.logits[i].size() != snapshot.pools[i].size()) {
      throw Error(ErrorKind::kShape, "instance '" + snapshot.ids[i] + "': logits/pool mismatch");
    }
    for (double z : snapshot.logits[i]) {
      if (!std::isfinite(z)) {
        throw Error(ErrorKind::kNumeric, "instance '" + snapshot.ids[i] + "': non-finite logit");
      }
    }
  }
}

io::Json to_json(const StepLog& log) {
  return {{"step", log.step},
          {"mean_reward", log.mean_reward},
          {"mean_kl", log.mean_kl},
          {"objective", log.objective}};
}

// ---------------------------------------------------------------------------

GrpoToyTrainer::GrpoToyTrainer(std::vector<ToyInstance> instances, RewardFn reward,
                               GrpoConfig cfg)
    : cfg_(cfg), reward_fn_(std::move(reward)), rng_(cfg.seed) {
  validate(cfg_);
  if (instances.empty()) throw Error(ErrorKind::kEmptyInput, "trainer needs at least one instance");
  if (!reward_fn_) throw Error(ErrorKind::kConfiguration, "trainer needs a reward function");
  for (auto& inst : instances) {
    if (inst.pool.size() < 2) {
      throw Error(ErrorKind::kValidation,
                  "instance '" + inst.id + "' needs a pool of at least two candidates");
    }
    policy_.ids.push_back(inst.id);
    policy_.logits.emplace_back(inst.pool.size(), 0.0);
    reward_cache_.emplace_back(inst.pool.size());
    reward_failed_.emplace_back(inst.pool.size(), false);
    policy_.pools.push_back(std::move(inst.pool));
  }
  reference_ = policy_;
}

double GrpoToyTrainer::reward(std::size_t instance, std::size_t candidate, bool& ok) {
  ok = true;
  if (reward_failed_[instance][candidate]) {
    ok = false;
    return 0.0;
  }
  auto& slot = reward_cache_[instance][candidate];
  if (!slot) {
    try {
      slot = reward_fn_(instance, candidate);
    } catch (const Error& e) {
      reward_failed_[instance][candidate] = true;
      log::warn("reward_failed", {{"id", policy_.ids[instance]},
                                  {"candidate", candidate},
                                  {"error", e.what()}});
      ok = false;
      return 0.0;
    }
  }
  return *slot;
}

StepLog GrpoToyTrainer::step() {
  const std::size_t n = policy_.ids.size();
  const std::size_t g = cfg_.group_size;
  StepLog out;
  out.step = ++steps_;

  std::vector<std::vector<std::size_t>> samples(n);
  std::vector<std::vector<double>> advantages(n);
  std::vector<std::vector<double>> old_logits = policy_.logits;
  double reward_sum = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto probs = softmax(old_logits[i], cfg_.temperature);
    std::vector<double> rewards(g);
    std::vector<bool> ok(g);
    for (std::size_t s = 0; s < g; ++s) {
      const std::size_t c = rng_.categorical(probs);
      samples[i].push_back(c);
      bool good = true;
      rewards[s] = reward(i, c, good);
      ok[s] = good;
    }
    double group_min = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < g; ++s) {
      if (ok[s]) group_min = std::min(group_min, rewards[s]);
    }
    if (!std::isfinite(group_min)) group_min = 0.0;
    for (std::size_t s = 0; s < g; ++s) {
      if (!ok[s]) rewards[s] = group_min;
      reward_sum += rewards[s];
    }
    advantages[i] = group_advantage(rewards);

    const auto grad = policy_gradient(old_logits[i], old_logits[i], reference_.logits[i],
                                      samples[i], advantages[i], cfg_);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      policy_.logits[i][k] += cfg_.learning_rate * grad[k];
    }
  }

  double kl_sum = 0.0;
  double objective_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    kl_sum += categorical_kl(policy_.logits[i], reference_.logits[i]);
    objective_sum += instance_objective(policy_.logits[i], old_logits[i], reference_.logits[i],
                                        samples[i], advantages[i], cfg_);
  }
  out.mean_reward = reward_sum / static_cast<double>(n * g);
  out.mean_kl = kl_sum / static_cast<double>(n);
  out.objective = objective_sum / static_cast<double>(n);
  return out;
}

void GrpoToyTrainer::clear_reward_cache() {
  for (auto& row : reward_cache_) std::fill(row.begin(), row.end(), std::nullopt);
  for (auto& row : reward_failed_) std::fill(row.begin(), row.end(), false);
}

std::vector<StepLog> GrpoToyTrainer::train() {
  std::vector<StepLog> log;
  log.reserve(cfg_.steps);
  for (std::size_t s = 0; s < cfg_.steps; ++s) log.push_back(step());
  return log;
}

ToyResult train_toy(std::vector<ToyInstance> instances, RewardFn reward, const GrpoConfig& cfg) {
  GrpoToyTrainer trainer(std::move(instances), std::move(reward), cfg);
  ToyResult result;
  result.log = trainer.train();
  result.policy = trainer.policy();
  return result;
}

}  // namespace topicsum::grpo
