// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include "topicsum/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "topicsum/corpus.hpp"
#include "topicsum/embed.hpp"
#include "topicsum/error.hpp"
#include "topicsum/evalharness.hpp"
#include "topicsum/grpo.hpp"
#include "topicsum/log.hpp"
#include "topicsum/parallel.hpp"
#include "topicsum/random.hpp"
#include "topicsum/rewards.hpp"
#include "topicsum/select.hpp"
#include "topicsum/topics.hpp"

namespace topicsum::cli {
namespace {

using io::Json;
namespace fs = std::filesystem;

bool is_dataset_preset(const std::string& name) { return name == "news" || name == "xscience"; }

// Flags that override a field of the JSON configuration.
enum class ValueKind { kString, kInt, kNumber, kList, kFlag };

struct Binding {
  std::string pointer;
  ValueKind kind;
  std::string value;
  bool flag = false;
  CLI::Option* option = nullptr;
};

class Bindings {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& pointer, ValueKind kind,
           const std::string& help) {
    auto b = std::make_unique<Binding>();
    b->pointer = pointer;
    b->kind = kind;
    if (kind == ValueKind::kFlag) {
      b->option = app->add_flag(name, b->flag, help);
    } else {
      b->option = app->add_option(name, b->value, help);
      if (kind == ValueKind::kInt) b->option->check(CLI::NonNegativeNumber);
      if (kind == ValueKind::kNumber) b->option->check(CLI::Number);
    }
    items_.push_back(std::move(b));
  }

  void apply(Json& cfg) const {
    for (const auto& b : items_) {
      if (b->option->count() == 0) continue;
      const Json::json_pointer ptr(b->pointer);
      switch (b->kind) {
        case ValueKind::kString: cfg[ptr] = b->value; break;
        case ValueKind::kInt: cfg[ptr] = std::stoull(b->value); break;
        case ValueKind::kNumber: cfg[ptr] = std::stod(b->value); break;
        case ValueKind::kFlag: cfg[ptr] = b->flag; break;
        case ValueKind::kList: {
          Json list = Json::array();
          std::stringstream ss(b->value);
          std::string item;
          while (std::getline(ss, item, ',')) {
            if (auto t = io::trim(item); !t.empty()) list.push_back(t);
          }
          cfg[ptr] = std::move(list);
          break;
        }
      }
    }
  }

 private:
  std::vector<std::unique_ptr<Binding>> items_;
};

struct Args {
  std::string config_path;
  std::string preset;
  std::string log_level = "info";
  std::string input;
  std::size_t limit = 0;
  std::string summaries;
  std::string topics_path;
  std::string candidates;
  std::string pools;
  std::string out;
  std::string report;
  std::string log_path;
  std::string policy_out;
  std::string validation;
  std::string write_dataset;
};

template <typename T>
T get(const Json& cfg, const std::string& pointer) {
  try {
    return cfg.at(Json::json_pointer(pointer)).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kConfiguration, "config field " + pointer + ": " + e.what());
  }
}

bool is_null(const Json& cfg, const std::string& pointer) {
  const Json::json_pointer ptr(pointer);
  return !cfg.contains(ptr) || cfg.at(ptr).is_null();
}

Json redacted(Json cfg) {
  if (cfg.contains("api_token") && !cfg["api_token"].is_null()) cfg["api_token"] = "***";
  return cfg;
}

Json load_config(const Args& args, const Bindings& bindings) {
  Json file = Json::object();
  if (!args.config_path.empty()) {
    try {
      file = Json::parse(io::read_text_file(args.config_path));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kConfiguration, "config file " + args.config_path + ": " + e.what());
    }
    if (!file.is_object()) {
      throw Error(ErrorKind::kConfiguration, "config file must hold a JSON object");
    }
  }
  std::string dataset_preset = "news";
  if (file.contains("preset") && file["preset"].is_string()) {
    dataset_preset = file["preset"].get<std::string>();
  }
  if (is_dataset_preset(args.preset)) dataset_preset = args.preset;

  Json cfg = default_config(dataset_preset);
  cfg.merge_patch(file);
  cfg["preset"] = dataset_preset;

  if (const char* v = std::getenv(kEnvEmbedEndpoint); v && *v) cfg["embedding"]["endpoint"] = v;
  if (const char* v = std::getenv(kEnvChatEndpoint); v && *v) cfg["extractor"]["endpoint"] = v;
  if (const char* v = std::getenv(kEnvApiToken); v && *v) cfg["api_token"] = v;

  bindings.apply(cfg);
  if (!args.preset.empty() && !is_dataset_preset(args.preset)) {
    cfg["reward"]["preset"] = args.preset;
  }
  return cfg;
}

std::optional<std::string> api_token(const Json& cfg) {
  if (is_null(cfg, "/api_token")) return std::nullopt;
  return get<std::string>(cfg, "/api_token");
}

embed::EmbeddingProviderConfig embedding_config(const Json& cfg) {
  embed::EmbeddingProviderConfig c;
  const auto kind = get<std::string>(cfg, "/embedding/provider");
  if (kind == "remote") {
    c.kind = embed::ProviderKind::kRemote;
  } else if (kind == "deterministic") {
    c.kind = embed::ProviderKind::kDeterministic;
  } else {
    throw Error(ErrorKind::kConfiguration, "unknown embedding provider '" + kind + "'");
  }
  c.endpoint = get<std::string>(cfg, "/embedding/endpoint");
  c.model_name = get<std::string>(cfg, "/embedding/model");
  c.api_token = api_token(cfg);
  c.dim = get<std::size_t>(cfg, "/embedding/dim");
  c.seed = get<std::uint64_t>(cfg, "/embedding/seed");
  c.timeout_ms = get<int>(cfg, "/embedding/timeout_ms");
  c.max_attempts = get<int>(cfg, "/embedding/max_attempts");
  c.max_concurrency = get<std::size_t>(cfg, "/embedding/max_concurrency");
  c.batch_size = get<std::size_t>(cfg, "/embedding/batch_size");
  if (!is_null(cfg, "/embedding/cache_path")) {
    c.cache_path = get<std::string>(cfg, "/embedding/cache_path");
  }
  return c;
}

topics::TopicExtractorConfig extractor_config(const Json& cfg) {
  topics::TopicExtractorConfig c;
  const auto kind = get<std::string>(cfg, "/extractor/kind");
  if (kind == "llm") {
    c.kind = topics::ExtractorKind::kLlm;
  } else if (kind == "frequency") {
    c.kind = topics::ExtractorKind::kFrequency;
  } else {
    throw Error(ErrorKind::kConfiguration, "unknown topic extractor '" + kind + "'");
  }
  c.endpoint = get<std::string>(cfg, "/extractor/endpoint");
  c.model_name = get<std::string>(cfg, "/extractor/model");
  c.api_token = api_token(cfg);
  c.count = get<std::size_t>(cfg, "/topics/n");
  c.temperature = get<double>(cfg, "/extractor/temperature");
  c.stopword_list_id = get<std::string>(cfg, "/extractor/stopwords");
  c.timeout_ms = get<int>(cfg, "/extractor/timeout_ms");
  c.max_attempts = get<int>(cfg, "/extractor/max_attempts");
  c.max_concurrency = get<std::size_t>(cfg, "/extractor/max_concurrency");
  return c;
}

grpo::GrpoConfig grpo_config(const Json& cfg) {
  grpo::GrpoConfig c;
  c.group_size = get<std::size_t>(cfg, "/grpo/group_size");
  c.clip_epsilon = get<double>(cfg, "/grpo/clip_epsilon");
  c.kl_coef = get<double>(cfg, "/grpo/kl_coef");
  c.learning_rate = get<double>(cfg, "/grpo/learning_rate");
  c.temperature = get<double>(cfg, "/grpo/temperature");
  c.steps = get<std::size_t>(cfg, "/grpo/steps");
  c.seed = get<std::uint64_t>(cfg, "/grpo/seed");
  grpo::validate(c);
  return c;
}

void reject_input_overwrite(const Args& args, const std::string& out_path) {
  if (out_path.empty()) return;
  for (const auto* in : {&args.input, &args.summaries, &args.topics_path, &args.candidates,
                         &args.pools, &args.validation, &args.config_path}) {
    if (in->empty() || !fs::exists(*in) || !fs::exists(out_path)) continue;
    if (fs::equivalent(*in, out_path)) {
      throw Error(ErrorKind::kConfiguration, "refusing to overwrite input file " + *in);
    }
  }
}

void emit(const Args& args, const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  reject_input_overwrite(args, path);
  io::write_text_file(path, content);
}

std::vector<corpus::DocumentSet> load_input(const Args& args) {
  if (args.limit > 0) return corpus::load_dataset(args.input, args.limit);
  return corpus::load_dataset(args.input);
}

// Environment shared by the scoring subcommands.
struct Pipeline {
  Json cfg;
  std::shared_ptr<topics::TopicExtractor> extractor;
  std::shared_ptr<embed::EmbeddingProvider> provider;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t workers = 1;
};

Pipeline make_pipeline(const Json& cfg) {
  Pipeline p;
  p.cfg = cfg;
  p.n = get<std::size_t>(cfg, "/topics/n");
  p.m = get<std::size_t>(cfg, "/topics/m");
  p.workers = std::max<std::size_t>(1, get<std::size_t>(cfg, "/workers"));
  p.extractor = topics::make_extractor(extractor_config(cfg));
  p.provider = embed::make_provider(embedding_config(cfg));
  return p;
}

/// Merges a topics file, then extracts topics for records still lacking them.
void ensure_doc_topics(std::vector<corpus::DocumentSet>& dataset, const Args& args,
                       Pipeline& p) {
  if (!args.topics_path.empty()) corpus::merge_topics(dataset, corpus::load_topics(args.topics_path));
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset[i].doc_topics) missing.push_back(i);
  }
  if (missing.empty()) return;
  log::info("extracting_doc_topics", {{"records", missing.size()}, {"n", p.n}});
  std::vector<corpus::DocumentSet> subset;
  for (auto i : missing) subset.push_back(dataset[i]);
  auto result = topics::extract_for_dataset(*p.extractor, subset, p.n);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    dataset[missing[j]] = std::move(result.dataset[j]);
  }
}

std::size_t resolve_expected_length(const Json& cfg, const Args& args,
                                    std::span<const corpus::DocumentSet> dataset) {
  if (!is_null(cfg, "/reward/expected_tokens")) {
    return get<std::size_t>(cfg, "/reward/expected_tokens");
  }
  const auto tokenizer = get<std::string>(cfg, "/reward/tokenizer");
  if (!args.validation.empty()) {
    const auto validation = corpus::load_dataset(args.validation);
    return rewards::estimate_expected_length(validation, tokenizer);
  }
  std::vector<corpus::DocumentSet> with_reference;
  for (const auto& set : dataset) {
    if (set.reference) with_reference.push_back(set);
  }
  if (with_reference.empty()) {
    throw Error(ErrorKind::kConfiguration,
                "length reward needs reward.expected_tokens, --validation, or references");
  }
  return rewards::estimate_expected_length(with_reference, tokenizer);
}

rewards::RewardScorer make_scorer(const Pipeline& p, const Args& args,
                                  std::span<const corpus::DocumentSet> dataset,
                                  const std::string& preset_name) {
  rewards::ScorerConfig sc;
  sc.preset = rewards::preset(preset_name);
  const Json& factors = p.cfg["reward"]["factors"];
  if (!factors.is_object()) throw Error(ErrorKind::kConfiguration, "reward.factors must be an object");
  for (const auto& [key, value] : factors.items()) {
    sc.preset.factors[rewards::parse_reward_kind(key)] = value.get<double>();
  }
  sc.summary_topic_count = p.m;
  sc.length.tokenizer_id = get<std::string>(p.cfg, "/reward/tokenizer");
  if (!has_tokenizer(sc.length.tokenizer_id)) {
    throw Error(ErrorKind::kConfiguration, "unknown tokenizer '" + sc.length.tokenizer_id + "'");
  }
  if (sc.preset.uses(rewards::RewardKind::kLength)) {
    sc.length.expected_tokens = resolve_expected_length(p.cfg, args, dataset);
    log::info("expected_length", {{"tokens", sc.length.expected_tokens}});
  }
  return rewards::RewardScorer(p.extractor, p.provider, sc);
}

/// Uses configured sigmas for every active reward, otherwise estimates from a
/// seeded mini-batch (configured values still win).
void resolve_sigmas(rewards::RewardScorer& scorer, const Json& cfg,
                    std::span<const corpus::DocumentSet> eligible,
                    const std::function<std::string(const corpus::DocumentSet&)>& sampler) {
  rewards::RewardMap configured;
  const Json& sig = cfg["reward"]["sigmas"];
  if (!sig.is_object()) throw Error(ErrorKind::kConfiguration, "reward.sigmas must be an object");
  for (const auto& [key, value] : sig.items()) {
    configured[rewards::parse_reward_kind(key)] = value.get<double>();
  }
  bool complete = true;
  for (auto kind : scorer.config().preset.active) complete = complete && configured.contains(kind);
  if (complete) {
    scorer.set_sigmas(configured);
    return;
  }
  if (eligible.empty()) throw Error(ErrorKind::kEmptyInput, "no records to estimate sigmas from");
  const double fraction = get<double>(cfg, "/reward/sigma_fraction");
  const std::size_t n = eligible.size();
  const auto by_fraction = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  const std::size_t batch_size =
      std::min(n, std::max({by_fraction, std::min<std::size_t>(n, 8), std::size_t{1}}));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(get<std::uint64_t>(cfg, "/grpo/seed") ^ 0x51a3ULL);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  std::vector<corpus::DocumentSet> batch;
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(eligible[order[i]]);
  auto sigmas = scorer.estimate_sigmas(batch, sampler);
  for (const auto& [kind, s] : configured) sigmas[kind] = s;
  scorer.set_sigmas(std::move(sigmas));
}

Json error_json(const Error& e) {
  return {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

// ---------------------------------------------------------------------------

int cmd_stats(const Args& args, const Json&, std::ostream& out) {
  const auto dataset = load_input(args);
  emit(args, args.out, corpus::to_json(corpus::compute_stats(dataset)).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_extract(const Args& args, const Json& cfg, std::ostream& out) {
  auto dataset = load_input(args);
  if (!args.topics_path.empty()) corpus::merge_topics(dataset, corpus::load_topics(args.topics_path));
  const auto ecfg = extractor_config(cfg);
  auto extractor = topics::make_extractor(ecfg);
  const auto result = topics::extract_for_dataset(*extractor, dataset, ecfg.count);
  reject_input_overwrite(args, args.out);
  corpus::save_topics(args.out, result.dataset);
  if (!args.write_dataset.empty()) {
    reject_input_overwrite(args, args.write_dataset);
    corpus::save_dataset(args.write_dataset, result.dataset);
  }
  Json summary = {{"records", result.dataset.size()},
                  {"extracted_documents", result.extracted_documents},
                  {"skipped_ids", result.skipped_ids},
                  {"warnings", result.warnings}};
  out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_score(const Args& args, const Json& cfg, std::ostream& out) {
  auto dataset = load_input(args);
  const auto summaries = corpus::load_summaries(args.summaries);
  for (const auto& [id, _] : summaries) {
    const bool known = std::any_of(dataset.begin(), dataset.end(),
                                   [&](const corpus::DocumentSet& s) { return s.id == id; });
    if (!known) log::warn("summary_without_record", {{"id", id}});
  }
  std::vector<corpus::DocumentSet> scored;
  for (const auto& set : dataset) {
    if (summaries.contains(set.id)) {
      scored.push_back(set);
    } else {
      log::warn("record_without_summary", {{"id", set.id}});
    }
  }
  auto pipeline = make_pipeline(cfg);
  const auto preset_name = get<std::string>(cfg, "/reward/preset");
  if (rewards::preset(preset_name).uses(rewards::RewardKind::kTopic)) {
    ensure_doc_topics(scored, args, pipeline);
  }
  auto scorer = make_scorer(pipeline, args, scored, preset_name);
  resolve_sigmas(scorer, cfg, scored,
                 [&](const corpus::DocumentSet& s) { return summaries.at(s.id); });

  std::vector<Json> lines(scored.size());
  std::atomic<std::size_t> ok{0};
  parallel_for(scored.size(), pipeline.workers, [&](std::size_t i) {
    const auto& set = scored[i];
    try {
      Json line = {{"id", set.id}};
      line.update(rewards::to_json(scorer.score(set, summaries.at(set.id))));
      lines[i] = std::move(line);
      ++ok;
    } catch (const Error& e) {
      lines[i] = {{"id", set.id}, {"error", error_json(e)}};
    }
  });
  std::string content;
  for (const auto& l : lines) content += l.dump() + "\n";
  emit(args, args.out, content, out);
  if (!scored.empty() && ok == 0) {
    throw Error(ErrorKind::kReward, "no record could be scored");
  }
  return kExitOk;
}

int cmd_train(const Args& args, const Json& cfg, std::ostream& out) {
  const auto gcfg = grpo_config(cfg);
  auto dataset = load_input(args);
  const auto pools = corpus::load_candidates(args.pools);
  std::vector<corpus::DocumentSet> records;
  std::vector<grpo::ToyInstance> instances;
  for (const auto& pool : pools) {
    auto it = std::find_if(dataset.begin(), dataset.end(),
                           [&](const corpus::DocumentSet& s) { return s.id == pool.id; });
    if (it == dataset.end()) {
      throw Error(ErrorKind::kLookup, "candidate pool '" + pool.id + "' has no dataset record");
    }
    records.push_back(*it);
    instances.push_back({pool.id, pool.candidates});
  }
  if (instances.empty()) throw Error(ErrorKind::kEmptyInput, "no candidate pools");

  auto pipeline = make_pipeline(cfg);
  const auto preset_name = get<std::string>(cfg, "/reward/preset");
  if (rewards::preset(preset_name).uses(rewards::RewardKind::kTopic)) {
    ensure_doc_topics(records, args, pipeline);
  }
  auto scorer = make_scorer(pipeline, args, records, preset_name);

  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < records.size(); ++i) index_of[records[i].id] = i;
  Rng sigma_rng(gcfg.seed ^ 0x7f4a7c15ULL);
  const grpo::PolicySnapshot* live_policy = nullptr;
  auto sampler = [&](const corpus::DocumentSet& s) {
    const std::size_t i = index_of.at(s.id);
    if (live_policy == nullptr) {
      const auto& pool = instances[i].pool;
      const auto j = static_cast<std::size_t>(sigma_rng.uniform() * static_cast<double>(pool.size()));
      return pool[std::min(j, pool.size() - 1)];
    }
    const auto probs = grpo::softmax(live_policy->logits[i], gcfg.temperature);
    return live_policy->pools[i][sigma_rng.categorical(probs)];
  };
  resolve_sigmas(scorer, cfg, records, sampler);

  grpo::GrpoToyTrainer trainer(
      instances,
      [&](std::size_t i, std::size_t c) {
        return scorer.score(records[i], instances[i].pool[c]).r_total;
      },
      gcfg);
  const auto every = get<std::size_t>(cfg, "/grpo/reestimate_sigmas_every");
  std::string log_content;
  for (std::size_t s = 0; s < gcfg.steps; ++s) {
    if (every > 0 && s > 0 && s % every == 0) {
      live_policy = &trainer.policy();
      Json patched = cfg;
      patched["reward"]["sigmas"] = Json::object();
      resolve_sigmas(scorer, patched, records, sampler);
      trainer.clear_reward_cache();
    }
    log_content += grpo::to_json(trainer.step()).dump() + "\n";
  }
  emit(args, args.log_path, log_content, out);

  std::string policy_content;
  Json best = Json::array();
  const auto& policy = trainer.policy();
  for (std::size_t i = 0; i < policy.ids.size(); ++i) {
    const auto probs = policy.probabilities(i);
    policy_content += Json({{"id", policy.ids[i]},
                            {"candidates", policy.pools[i]},
                            {"logits", policy.logits[i]},
                            {"probabilities", probs}})
                          .dump() +
                      "\n";
    const auto top = std::max_element(probs.begin(), probs.end()) - probs.begin();
    best.push_back({{"id", policy.ids[i]}, {"top_candidate", top}, {"probability", probs[top]}});
  }
  if (!args.policy_out.empty()) emit(args, args.policy_out, policy_content, out);
  log::info("train_complete", {{"steps", trainer.steps_taken()}, {"policy", best}});
  return kExitOk;
}

int cmd_best_of_n(const Args& args, const Json& cfg, std::ostream& out) {
  auto dataset = load_input(args);
  const auto pools = corpus::load_candidates(args.candidates);
  const auto n = get<std::size_t>(cfg, "/select/n");
  if (n == 0) throw Error(ErrorKind::kConfiguration, "--n must be >= 1");
  const auto metric_name = get<std::string>(cfg, "/select/metric");
  select::SelectMetric metric;
  if (metric_name == "topic-f1") {
    metric = select::SelectMetric::kTopicF1;
  } else if (metric_name == "total") {
    metric = select::SelectMetric::kTotalReward;
  } else {
    throw Error(ErrorKind::kConfiguration, "unknown selection metric '" + metric_name + "'");
  }

  std::vector<corpus::DocumentSet> records;
  std::vector<std::vector<std::string>> candidates;
  for (const auto& pool : pools) {
    auto it = std::find_if(dataset.begin(), dataset.end(),
                           [&](const corpus::DocumentSet& s) { return s.id == pool.id; });
    if (it == dataset.end()) {
      log::warn("pool_without_record", {{"id", pool.id}});
      continue;
    }
    auto c = pool.candidates;
    if (c.size() > n) c.resize(n);
    if (c.size() < n) {
      log::warn("short_candidate_pool", {{"id", pool.id}, {"have", c.size()}, {"n", n}});
    }
    records.push_back(*it);
    candidates.push_back(std::move(c));
  }

  auto pipeline = make_pipeline(cfg);
  ensure_doc_topics(records, args, pipeline);
  const auto preset_name =
      metric == select::SelectMetric::kTopicF1 ? std::string("topic") : get<std::string>(cfg, "/reward/preset");
  auto scorer = make_scorer(pipeline, args, records, preset_name);
  if (metric == select::SelectMetric::kTotalReward) {
    std::map<std::string, std::string> first;
    for (std::size_t i = 0; i < records.size(); ++i) first[records[i].id] = candidates[i].front();
    resolve_sigmas(scorer, cfg, records,
                   [&](const corpus::DocumentSet& s) { return first.at(s.id); });
  } else {
    scorer.set_sigmas({{rewards::RewardKind::kTopic, 1.0}});
  }

  std::string content;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      content += select::to_json(select::best_of_n(records[i], candidates[i], scorer, metric,
                                                   pipeline.workers))
                     .dump() +
                 "\n";
      ++ok;
    } catch (const Error& e) {
      content += Json({{"id", records[i].id}, {"error", error_json(e)}}).dump() + "\n";
    }
  }
  emit(args, args.out, content, out);
  if (!records.empty() && ok == 0) throw Error(ErrorKind::kSelection, "no record had a winner");
  return kExitOk;
}

int cmd_eval(const Args& args, const Json& cfg, std::ostream& out) {
  auto dataset = load_input(args);
  const auto summaries = corpus::load_summaries(args.summaries);
  evalharness::EvalConfig ecfg;
  ecfg.topic = false;
  for (const auto& metric : get<std::vector<std::string>>(cfg, "/eval/metrics")) {
    if (metric == "topic") {
      ecfg.topic = true;
    } else if (metric == "rouge") {
      ecfg.rouge = true;
    } else {
      throw Error(ErrorKind::kConfiguration, "unknown metric '" + metric + "'");
    }
  }
  ecfg.token_limit = get<std::size_t>(cfg, "/eval/token_limit");
  ecfg.tokenizer_id = get<std::string>(cfg, "/reward/tokenizer");
  ecfg.summary_topic_count = get<std::size_t>(cfg, "/topics/m");
  ecfg.max_workers = std::max<std::size_t>(1, get<std::size_t>(cfg, "/workers"));

  std::unique_ptr<Pipeline> pipeline;
  if (ecfg.topic) {
    pipeline = std::make_unique<Pipeline>(make_pipeline(cfg));
    std::vector<corpus::DocumentSet> covered;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (summaries.contains(dataset[i].id)) {
        covered.push_back(dataset[i]);
        where.push_back(i);
      }
    }
    ensure_doc_topics(covered, args, *pipeline);
    for (std::size_t j = 0; j < where.size(); ++j) dataset[where[j]] = std::move(covered[j]);
  }
  const auto report =
      evalharness::evaluate(dataset, summaries, ecfg, pipeline ? pipeline->extractor.get() : nullptr,
                            pipeline ? pipeline->provider.get() : nullptr);
  emit(args, args.report, evalharness::to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

void add_common(CLI::App* app, Args& args, Bindings& b) {
  std::vector<std::string> presets = {"news", "xscience"};
  for (const auto& name : rewards::preset_names()) presets.push_back(name);
  app->add_option("--config", args.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--preset", args.preset,
                  "Dataset preset (news, xscience) or reward preset (topic+len, ...)")
      ->check(CLI::IsMember(presets));
  app->add_option("--log-level", args.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
  app->add_option("--input", args.input, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  app->add_option("--limit", args.limit, "Read at most this many records");
  b.add(app, "--embedder", "/embedding/provider", ValueKind::kString, "deterministic or remote");
  b.add(app, "--embed-endpoint", "/embedding/endpoint", ValueKind::kString, "Embeddings URL");
  b.add(app, "--embed-model", "/embedding/model", ValueKind::kString, "Embedding model name");
  b.add(app, "--embed-dim", "/embedding/dim", ValueKind::kInt, "Deterministic embedding size");
  b.add(app, "--embed-seed", "/embedding/seed", ValueKind::kInt, "Deterministic embedding seed");
  b.add(app, "--embed-cache", "/embedding/cache_path", ValueKind::kString, "Embedding cache file");
  b.add(app, "--extractor", "/extractor/kind", ValueKind::kString, "frequency or llm");
  b.add(app, "--chat-endpoint", "/extractor/endpoint", ValueKind::kString, "Chat completions URL");
  b.add(app, "--chat-model", "/extractor/model", ValueKind::kString, "Chat model name");
  b.add(app, "--stopwords", "/extractor/stopwords", ValueKind::kString,
        "english, none or file:<path>");
  b.add(app, "--n-topics", "/topics/n", ValueKind::kInt, "Topics per source document");
  b.add(app, "--m-topics", "/topics/m", ValueKind::kInt, "Topics per summary");
  b.add(app, "--reward", "/reward/preset", ValueKind::kString, "Reward preset");
  b.add(app, "--expected-tokens", "/reward/expected_tokens", ValueKind::kInt,
        "Target summary length in tokens");
  b.add(app, "--tokenizer", "/reward/tokenizer", ValueKind::kString, "Tokenizer id");
  b.add(app, "--seed", "/grpo/seed", ValueKind::kInt, "Random seed");
  b.add(app, "--workers", "/workers", ValueKind::kInt, "Parallel workers");
  app->add_option("--validation", args.validation, "Validation JSONL for the expected length")
      ->check(CLI::ExistingFile);
}

}  // namespace

Json default_config(const std::string& dataset_preset) {
  if (!is_dataset_preset(dataset_preset)) {
    throw Error(ErrorKind::kConfiguration, "unknown dataset preset '" + dataset_preset + "'");
  }
  const bool news = dataset_preset == "news";
  return {
      {"preset", dataset_preset},
      {"prompt_style", news ? "news" : "xscience"},
      {"topics", {{"n", news ? 10 : 5}, {"m", 5}}},
      {"embedding",
       {{"provider", "deterministic"},
        {"endpoint", ""},
        {"model", ""},
        {"dim", 64},
        {"seed", embed::kDefaultDeterministicSeed},
        {"timeout_ms", 30000},
        {"max_attempts", 3},
        {"max_concurrency", 4},
        {"batch_size", 64},
        {"cache_path", nullptr}}},
      {"extractor",
       {{"kind", "frequency"},
        {"endpoint", ""},
        {"model", ""},
        {"temperature", 0.0},
        {"stopwords", "english"},
        {"timeout_ms", 60000},
        {"max_attempts", 3},
        {"max_concurrency", 4}}},
      {"reward",
       {{"preset", "topic+len"},
        {"factors", Json::object()},
        {"sigmas", Json::object()},
        {"expected_tokens", nullptr},
        {"tokenizer", std::string(kWhitespaceTokenizer)},
        {"sigma_fraction", 0.05}}},
      {"grpo",
       {{"group_size", 8},
        {"clip_epsilon", 0.2},
        {"kl_coef", 0.04},
        {"learning_rate", grpo::kToyLearningRate},
        {"temperature", 0.7},
        {"steps", 200},
        {"seed", 42},
        {"reestimate_sigmas_every", 0}}},
      {"select", {{"n", select::kDefaultN}, {"metric", "topic-f1"}}},
      {"eval", {{"metrics", {"topic"}}, {"token_limit", evalharness::kDefaultTokenLimit}}},
      {"workers", 4},
      {"api_token", nullptr},
  };
}

int run(std::span<const std::string> args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic-guided rewards, GRPO toy training and topic-alignment evaluation"};
  app.name("topicsum");
  app.require_subcommand(1);
  Args args;
  Bindings bindings;

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  add_common(stats, args, bindings);
  stats->add_option("--out", args.out, "Write the report here instead of stdout");

  auto* extract = app.add_subcommand("extract-topics", "Extract topic phrases per document");
  add_common(extract, args, bindings);
  extract->add_option("--out", args.out, "Topics JSONL {id, doc_topics}")->required();
  extract->add_option("--topics", args.topics_path, "Existing topics to keep")
      ->check(CLI::ExistingFile);
  extract->add_option("--write-dataset", args.write_dataset, "Also write the merged dataset");

  auto* score = app.add_subcommand("score", "Score summaries with a reward preset");
  add_common(score, args, bindings);
  score->add_option("--summaries", args.summaries, "Summaries JSONL {id, summary}")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--topics", args.topics_path, "Topics JSONL")->check(CLI::ExistingFile);
  score->add_option("--out", args.out, "Scores JSONL (default stdout)");

  auto* train = app.add_subcommand("train-toy", "GRPO on a categorical policy over candidate pools");
  add_common(train, args, bindings);
  train->add_option("--pools", args.pools, "Candidate pools JSONL {id, candidates}")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--topics", args.topics_path, "Topics JSONL")->check(CLI::ExistingFile);
  train->add_option("--log", args.log_path, "Training log JSONL (default stdout)");
  train->add_option("--policy-out", args.policy_out, "Final policy JSONL");
  bindings.add(train, "--steps", "/grpo/steps", ValueKind::kInt, "Training steps");
  bindings.add(train, "--group-size", "/grpo/group_size", ValueKind::kInt, "Group size G");
  bindings.add(train, "--lr", "/grpo/learning_rate", ValueKind::kNumber, "Learning rate");
  bindings.add(train, "--beta", "/grpo/kl_coef", ValueKind::kNumber, "KL coefficient");
  bindings.add(train, "--epsilon", "/grpo/clip_epsilon", ValueKind::kNumber, "Clip epsilon");
  bindings.add(train, "--temperature", "/grpo/temperature", ValueKind::kNumber,
               "Sampling temperature");
  bindings.add(train, "--reestimate-sigmas", "/grpo/reestimate_sigmas_every", ValueKind::kInt,
               "Re-estimate reward sigmas every N steps (0 = never)");

  auto* bon = app.add_subcommand("best-of-n", "Pick the best candidate per record");
  add_common(bon, args, bindings);
  bon->add_option("--candidates", args.candidates, "Candidates JSONL {id, candidates}")
      ->required()
      ->check(CLI::ExistingFile);
  bon->add_option("--topics", args.topics_path, "Topics JSONL")->check(CLI::ExistingFile);
  bon->add_option("--out", args.out, "Winners JSONL (default stdout)");
  bindings.add(bon, "--n", "/select/n", ValueKind::kInt, "Candidates considered per record");
  bindings.add(bon, "--metric", "/select/metric", ValueKind::kString, "topic-f1 or total");

  auto* eval = app.add_subcommand("eval", "Topic-alignment and ROUGE evaluation");
  add_common(eval, args, bindings);
  eval->add_option("--summaries", args.summaries, "Summaries JSONL {id, summary}")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--topics", args.topics_path, "Topics JSONL")->check(CLI::ExistingFile);
  eval->add_option("--report", args.report, "Report JSON (default stdout)");
  bindings.add(eval, "--metrics", "/eval/metrics", ValueKind::kList, "Comma list: topic,rouge");
  bindings.add(eval, "--token-limit", "/eval/token_limit", ValueKind::kInt,
               "Overlong threshold in tokens");

  std::vector<const char*> argv = {"topicsum"};
  for (const auto& a : args_in) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  log::Level level = log::Level::kInfo;
  if (args.log_level == "debug") level = log::Level::kDebug;
  if (args.log_level == "warn") level = log::Level::kWarn;
  if (args.log_level == "error") level = log::Level::kError;
  if (args.log_level == "off") level = log::Level::kOff;
  log::ScopedSink sink(&err, level);

  CLI::App* sub = app.get_subcommands().front();
  try {
    const Json cfg = load_config(args, bindings);
    log::info("effective_config", {{"subcommand", sub->get_name()}, {"config", redacted(cfg)}});
    if (sub == stats) return cmd_stats(args, cfg, out);
    if (sub == extract) return cmd_extract(args, cfg, out);
    if (sub == score) return cmd_score(args, cfg, out);
    if (sub == train) return cmd_train(args, cfg, out);
    if (sub == bon) return cmd_best_of_n(args, cfg, out);
    return cmd_eval(args, cfg, out);
  } catch (const Error& e) {
    err << Json({{"error", error_json(e)}}).dump() << "\n";
  } catch (const std::exception& e) {
    err << Json({{"error", {{"kind", "internal_error"}, {"message", e.what()}}}}).dump() << "\n";
  }
  return kExitRuntime;
}

}  // namespace topicsum::cli
