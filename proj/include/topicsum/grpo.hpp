// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Group-relative advantages, the clipped surrogate objective with a KL
// penalty, and a trainer over a per-instance categorical policy whose support
// is a fixed pool of candidate summaries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicsum/io.hpp"
#include "topicsum/random.hpp"

namespace topicsum::grpo {

struct GrpoConfig {
  std::size_t group_size = 8;
  double clip_epsilon = 0.2;
  double kl_coef = 0.04;
  double learning_rate = 1e-6;
  double temperature = 0.7;
  std::size_t steps = 200;
  std::uint64_t seed = 42;
};

inline constexpr double kToyLearningRate = 0.1;
inline constexpr double kAdvantageEpsilon = 1e-8;

/// kConfiguration on out-of-range fields.
void validate(const GrpoConfig& cfg);

/// (R_g - mean) / (population std + 1e-8). kPrecondition for fewer than two
/// rewards.
std::vector<double> group_advantage(std::span<const double> rewards);

std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0);
std::vector<double> log_softmax(std::span<const double> logits);

/// sum_i p_i log(p_i / q_i) with p = softmax(p_logits), q = softmax(ref_logits).
double categorical_kl(std::span<const double> p_logits, std::span<const double> ref_logits);

struct CompletionGroup {
  std::string instance_id;
  std::vector<std::string> completions;
  std::vector<double> rewards;
  std::vector<double> logprob_new;
  std::vector<double> logprob_old;
};

/// kShape for unequal lengths or G < 2, kDomain for a positive or non-finite
/// log-probability.
void validate(const CompletionGroup& group);

/// (1/G) sum_g min(r_g A_g, clip(r_g, 1-eps, 1+eps) A_g) - beta * kl with
/// r_g = exp(logprob_new - logprob_old). A value to maximize. Accepts a single
/// term so the clip arithmetic can be exercised in isolation.
double surrogate_objective(std::span<const double> logprob_new,
                           std::span<const double> logprob_old,
                           std::span<const double> advantages, double clip_epsilon,
                           double kl_coef, double kl);
double surrogate_objective(const CompletionGroup& group, std::span<const double> advantages,
                           const GrpoConfig& cfg, double kl);

/// Surrogate for one categorical instance as a function of its logits.
/// `samples` index into the pool.
double instance_objective(std::span<const double> logits, std::span<const double> old_logits,
                          std::span<const double> ref_logits, std::span<const std::size_t> samples,
                          std::span<const double> advantages, const GrpoConfig& cfg);

/// Exact gradient of instance_objective with respect to `logits`. Where the
/// min picks the clipped branch the ratio contributes no gradient.
std::vector<double> policy_gradient(std::span<const double> logits,
                                    std::span<const double> old_logits,
                                    std::span<const double> ref_logits,
                                    std::span<const std::size_t> samples,
                                    std::span<const double> advantages, const GrpoConfig& cfg);

/// Position of each completion in the pool; kLookup when absent.
std::vector<std::size_t> completion_indices(std::span<const std::string> pool,
                                            std::span<const std::string> completions);

struct PolicySnapshot {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> pools;
  std::vector<std::vector<double>> logits;

  std::vector<double> probabilities(std::size_t instance) const;
};

/// Non-empty pools, finite logits, matching sizes.
void validate(const PolicySnapshot& snapshot);

struct StepLog {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double mean_kl = 0.0;
  double objective = 0.0;

  bool operator==(const StepLog&) const = default;
};

io::Json to_json(const StepLog& log);

struct ToyInstance {
  std::string id;
  std::vector<std::string> pool;
};

/// Reward of pool[candidate] for the given instance. Errors of type
/// topicsum::Error are absorbed by the trainer.
using RewardFn = std::function<double(std::size_t instance, std::size_t candidate)>;

/// Each step: sample G candidates per instance from softmax(theta_old / T),
/// compute advantages, take one gradient-ascent step, refresh theta_old. The
/// logged objective is the surrogate re-evaluated after the update. Rewards are
/// memoized per (instance, candidate). A candidate whose reward throws gets
/// the minimum of its group's successful rewards.
class GrpoToyTrainer {
 public:
  GrpoToyTrainer(std::vector<ToyInstance> instances, RewardFn reward, GrpoConfig cfg);

  StepLog step();
  std::vector<StepLog> train();

  const PolicySnapshot& policy() const { return policy_; }
  const PolicySnapshot& reference() const { return reference_; }
  std::size_t steps_taken() const { return steps_; }

  /// Forgets memoized rewards, e.g. after the reward weights change.
  void clear_reward_cache();

 private:
  double reward(std::size_t instance, std::size_t candidate, bool& ok);

  GrpoConfig cfg_;
  RewardFn reward_fn_;
  PolicySnapshot policy_;
  PolicySnapshot reference_;
  std::vector<std::vector<std::optional<double>>> reward_cache_;
  std::vector<std::vector<bool>> reward_failed_;
  Rng rng_;
  std::size_t steps_ = 0;
};

struct ToyResult {
  PolicySnapshot policy;
  std::vector<StepLog> log;
};

ToyResult train_toy(std::vector<ToyInstance> instances, RewardFn reward, const GrpoConfig& cfg);

}  // namespace topicsum::grpo
