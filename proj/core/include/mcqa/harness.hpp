// Copyright 2026 The mcqa-space Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end evaluation runs: render, resolve label tokens, score, cache,
// aggregate, and compare the two tokenization strategies.

#ifndef MCQA_HARNESS_HPP_
#define MCQA_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcqa/http_backend.hpp"
#include "mcqa/metrics.hpp"
#include "mcqa/prompt.hpp"
#include "mcqa/scoring.hpp"
#include "mcqa/significance.hpp"
#include "mcqa/tokenizer.hpp"

namespace mcqa {

struct BackendDescriptor {
  enum class Kind { kMock, kEndpoint };
  Kind kind = Kind::kMock;
  std::filesystem::path mock_spec;  // kMock
  HttpBackendOptions endpoint;      // kEndpoint
};

std::unique_ptr<ScoringBackend> make_backend(const BackendDescriptor& d);

struct PermutationSpec {
  std::size_t count = 5;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::filesystem::path dataset_path;
  std::string dataset_id;  // defaults to the dataset file stem
  std::filesystem::path vocab_path;
  std::string model_id;
  BackendDescriptor backend;

  std::string template_id = "base";
  std::optional<Variation> variation;
  std::string language = "en";
  // Language pack (JSON); empty means the built-in English templates.
  std::filesystem::path template_pack;
  std::optional<RoleWrappers> roles;  // overrides for instruct templates

  TokenizationStrategy strategy = TokenizationStrategy::kLetterOnly;
  std::size_t shots = 0;
  std::filesystem::path exemplar_path;  // required when shots > 0
  std::uint64_t seed = 0;               // exemplar draw
  bool cot = false;
  int cot_max_tokens = 512;

  std::optional<PermutationSpec> permutations;
  std::size_t bootstrap_iterations = kDefaultBootstrapIterations;
  std::uint64_t bootstrap_seed = 0;
  Sidedness sidedness = Sidedness::kOneSidedBGreater;
  std::size_t num_bins = 10;
  std::size_t parallelism = 1;
  std::filesystem::path cache_dir;  // empty disables caching

  // Set by the permutation suite; part of cache keys.
  std::string permutation_tag = "identity";
};

// Checks field invariants and that referenced files exist. validate_inputs
// skips the model id and backend descriptor.
void validate(const RunConfig& cfg);
void validate_inputs(const RunConfig& cfg);

// Everything a run needs besides the backend, loaded once.
struct EvalInputs {
  std::vector<Question> questions;
  std::vector<Question> exemplar_pool;
  PromptTemplate prompt_template;
  std::shared_ptr<const TokenizerModel> tokenizer;
  std::string dataset_id;
};

EvalInputs load_inputs(const RunConfig& cfg);

// Resolves the template named by cfg (pack or built-in, roles, variation).
PromptTemplate resolve_template(const RunConfig& cfg, std::size_t n_options);

// Deterministic exemplar draw for `q` from `pool`: same-subject items when
// the subject has enough, else the whole pool; never `q` itself.
std::vector<Question> select_exemplars(const Question& q,
                                       std::span<const Question> pool,
                                       std::size_t shots, std::uint64_t seed);

// One request per distinct prompt; `options[i]` is the option index whose
// logit is candidates[i].
struct PlannedRequest {
  ScoreRequest request;
  std::vector<std::size_t> options;
};

// Multi-token labels: every token but the last is appended to the prompt and
// the last one is scored.
std::vector<PlannedRequest> plan_score_requests(const RenderedPrompt& rendered,
                                                const LabelTokenSet& labels,
                                                const TokenizerModel& tokenizer);

std::string request_signature(std::span<const PlannedRequest> plan);

struct ExampleRecord {
  std::string example_id;
  std::size_t gold_index = 0;
  std::vector<double> logits;
  ExampleResult result;
  std::string request_signature;
  bool multi_token_labels = false;
  std::optional<std::string> generated;
  bool from_cache = false;
};

struct RunOutput {
  RunResult result;
  std::vector<ExampleRecord> records;  // sorted by example id
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  bool multi_token_labels = false;
};

// Evaluates every question with `backend`. Fails closed: any scoring error
// aborts with Error{kScoringFailed} listing the failing example ids, after
// the successful examples have been cached.
RunOutput run_eval(const RunConfig& cfg, const EvalInputs& inputs,
                   ScoringBackend& backend);

struct ComparisonRow {
  std::string model_id;
  RunResult letter;  // A
  RunResult space;   // B
  // Accuracy B minus accuracy A, computed as (b - c) / n from the paired
  // discordant counts so it is a single correctly rounded quotient.
  double accuracy_delta = 0.0;
  McNemarResult mcnemar;
  BootstrapResult bootstrap;
  bool accuracy_significant = false;
  bool ece_significant = false;
  // Every example sent token-identical requests under both strategies.
  bool strategy_identical = false;
  bool predictions_identical = false;
  bool multi_token_labels = false;
  bool cot = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::string dataset_id;
  std::string template_id;
  std::size_t shots = 0;
  bool cot = false;
  std::size_t bootstrap_iterations = 0;
  std::uint64_t bootstrap_seed = 0;
  Sidedness sidedness = Sidedness::kOneSidedBGreater;
};

struct StrategyComparison {
  ComparisonReport report;
  RunOutput letter;
  RunOutput space;
  std::vector<PairedOutcome> pairs;
};

// Pairs two finished runs by example id. Throws kPairingMismatch when the id
// sets differ.
std::vector<PairedOutcome> pair_runs(const RunOutput& letter,
                                     const RunOutput& space);

ComparisonRow make_comparison_row(const RunConfig& cfg, const RunOutput& letter,
                                  const RunOutput& space);

// Runs both strategies (cfg.strategy is ignored) and attaches the tests.
StrategyComparison compare_strategies(const RunConfig& cfg,
                                      const EvalInputs& inputs,
                                      ScoringBackend& backend);

struct ModelRuns {
  std::string model_id;
  std::optional<RunResult> letter;
  std::optional<RunResult> space;
};

struct LeaderboardEntry {
  std::string model_id;
  double accuracy = 0.0;
};

struct LeaderboardReport {
  std::vector<LeaderboardEntry> ranking_letter;
  std::vector<LeaderboardEntry> ranking_space;
  bool rank_flip = false;
  std::string top_letter;
  std::string top_space;
};

// Ranks by accuracy (descending), ties by model id.
LeaderboardReport leaderboard(std::span<const ModelRuns> runs);

struct PermutationSuiteReport {
  // Per option count n, the permutations applied (perm k is used for every
  // question with n options).
  std::vector<std::pair<std::size_t, std::vector<Permutation>>> permutations;
  std::vector<ComparisonReport> per_permutation;
  double mean_accuracy_letter = 0.0;
  double mean_accuracy_space = 0.0;
  double mean_ece_letter = 0.0;
  double mean_ece_space = 0.0;
  std::size_t accuracy_significant_count = 0;
  std::size_t ece_significant_count = 0;
};

PermutationSuiteReport run_permutation_suite(const RunConfig& cfg,
                                             const EvalInputs& inputs,
                                             ScoringBackend& backend,
                                             std::size_t count,
                                             std::uint64_t seed);

}  // namespace mcqa

#endif  // MCQA_HARNESS_HPP_
