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

#include "mcqa/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mcqa/cache.hpp"
#include "mcqa/dataset.hpp"
#include "mcqa/report.hpp"
#include "test_support.hpp"

namespace mcqa {
namespace {

using ::mcqa::testing::data_path;
using ::mcqa::testing::fixture_config;
using ::mcqa::testing::scratch_dir;
using ::mcqa::testing::three_flip_spec;
using ::testing::ElementsAre;

// Fails every request whose prompt contains one of `poison`.
class PoisonedBackend : public ScoringBackend {
 public:
  explicit PoisonedBackend(std::vector<std::string> poison)
      : poison_(std::move(poison)) {}
  std::string describe() const override { return "poisoned"; }

 protected:
  ScoreResponse do_score(const ScoreRequest& req) override {
    for (const auto& p : poison_) {
      if (req.prompt.find(p) != std::string::npos) {
        throw Error(ErrorCode::kTransport, "unreachable");
      }
    }
    ScoreResponse r;
    for (std::size_t i = 0; i < req.candidates.size(); ++i) {
      r.logits.push_back(static_cast<double>(i));
    }
    return r;
  }
  std::string do_generate(const GenerateRequest&) override { return ""; }

 private:
  std::vector<std::string> poison_;
};

MockBackendSpec always(const std::string& letter, double logit = 2.0) {
  MockBackendSpec spec;
  spec.set_score(MockBackendSpec::kAnyPrompt, letter, logit);
  spec.set_score(MockBackendSpec::kAnyPrompt, " " + letter, logit);
  return spec;
}

void expect_same_records(const RunOutput& x, const RunOutput& y) {
  ASSERT_EQ(x.records.size(), y.records.size());
  for (std::size_t i = 0; i < x.records.size(); ++i) {
    EXPECT_EQ(x.records[i].example_id, y.records[i].example_id);
    EXPECT_EQ(x.records[i].logits, y.records[i].logits);
    EXPECT_EQ(x.records[i].result.distribution, y.records[i].result.distribution);
    EXPECT_EQ(x.records[i].result.correct, y.records[i].result.correct);
    EXPECT_EQ(x.records[i].request_signature, y.records[i].request_signature);
  }
  EXPECT_EQ(x.result.accuracy, y.result.accuracy);
  EXPECT_EQ(x.result.ece, y.result.ece);
}

TEST(RunEval, AlwaysBIsRightSevenTimes) {
  const RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(always("B"));
  const RunOutput out = run_eval(cfg, in, mock);
  EXPECT_EQ(out.result.n, 20u);
  EXPECT_EQ(out.result.accuracy, 0.35);
  EXPECT_EQ(out.backend_calls, 20u);
  EXPECT_EQ(mock.call_count(), 20u);
  EXPECT_EQ(out.result.strategy, "letter");
  EXPECT_EQ(out.result.dataset_id, "fixture20");
  EXPECT_FALSE(out.multi_token_labels);
  for (const auto& r : out.records) EXPECT_EQ(r.result.predicted_index, 1u);
}

TEST(RunEval, ScoresTheStrategyCandidates) {
  RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackendSpec spec;
  spec.set_score(MockBackendSpec::kAnyPrompt, "C", 5.0);   // letter only
  spec.set_score(MockBackendSpec::kAnyPrompt, " D", 5.0);  // space-letter
  MockBackend mock(spec);
  cfg.strategy = TokenizationStrategy::kLetterOnly;
  EXPECT_EQ(run_eval(cfg, in, mock).records[0].result.predicted_index, 2u);
  cfg.strategy = TokenizationStrategy::kSpaceLetter;
  EXPECT_EQ(run_eval(cfg, in, mock).records[0].result.predicted_index, 3u);
}

TEST(CompareStrategies, ThreeFlipFixture) {
  const RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(three_flip_spec(in));
  const StrategyComparison cmp = compare_strategies(cfg, in, mock);
  const ComparisonRow& row = cmp.report.rows.at(0);
  EXPECT_EQ(row.letter.accuracy, 0.35);
  EXPECT_EQ(row.space.accuracy, 0.5);
  EXPECT_EQ(row.accuracy_delta, 0.15);
  EXPECT_EQ(row.mcnemar.b, 3u);
  EXPECT_EQ(row.mcnemar.c, 0u);
  EXPECT_EQ(row.mcnemar.p_value, 0.125);
  EXPECT_FALSE(row.accuracy_significant);
  EXPECT_FALSE(row.strategy_identical);
  EXPECT_FALSE(row.predictions_identical);
  std::vector<std::string> flipped;
  for (const auto& p : cmp.pairs) {
    EXPECT_FALSE(p.correct_a && !p.correct_b);
    if (p.correct_b && !p.correct_a) flipped.push_back(p.example_id);
  }
  EXPECT_EQ(flipped, testing::flip_ids());
}

TEST(CompareStrategies, WarmCacheReproducesWithoutCalls) {
  RunConfig cfg = fixture_config();
  cfg.cache_dir = scratch_dir("harness-warm");
  const EvalInputs in = load_inputs(cfg);

  MockBackend cold_mock(three_flip_spec(in));
  const StrategyComparison cold = compare_strategies(cfg, in, cold_mock);
  EXPECT_EQ(cold_mock.call_count(), 40u);
  EXPECT_EQ(cold.letter.cache_hits, 0u);

  MockBackend warm_mock(three_flip_spec(in));
  const StrategyComparison warm = compare_strategies(cfg, in, warm_mock);
  EXPECT_EQ(warm_mock.call_count(), 0u);
  EXPECT_EQ(warm.letter.backend_calls + warm.space.backend_calls, 0u);
  EXPECT_EQ(warm.letter.cache_hits, 20u);
  expect_same_records(cold.letter, warm.letter);
  expect_same_records(cold.space, warm.space);
  EXPECT_EQ(comparison_table(cold.report), comparison_table(warm.report));
  EXPECT_EQ(comparison_csv(cold.report), comparison_csv(warm.report));
  EXPECT_EQ(comparison_report_json(cfg, cold.report),
            comparison_report_json(cfg, warm.report));
}

TEST(CompareStrategies, NumericLabelsAreIdenticalAcrossStrategies) {
  RunConfig cfg = fixture_config();
  cfg.variation = Variation::kNumbers;
  const EvalInputs in = load_inputs(cfg);
  MockBackendSpec spec;
  spec.set_score(MockBackendSpec::kAnyPrompt, "1", 0.5);
  spec.set_score(MockBackendSpec::kAnyPrompt, "2", 1.5);
  spec.set_score(MockBackendSpec::kAnyPrompt, "3", -1.0);
  spec.set_score(MockBackendSpec::kAnyPrompt, "4", 0.25);
  MockBackend mock(spec);
  const StrategyComparison cmp = compare_strategies(cfg, in, mock);
  const ComparisonRow& row = cmp.report.rows.at(0);
  for (const auto& p : cmp.pairs) EXPECT_EQ(p.predicted_a, p.predicted_b);
  EXPECT_TRUE(row.predictions_identical);
  EXPECT_TRUE(row.strategy_identical);
  EXPECT_TRUE(row.multi_token_labels);
  EXPECT_EQ(row.accuracy_delta, 0.0);
  EXPECT_EQ(row.space.accuracy - row.letter.accuracy, 0.0);
  EXPECT_EQ(row.space.ece - row.letter.ece, 0.0);
  EXPECT_EQ(row.bootstrap.observed_delta, 0.0);
  EXPECT_EQ(row.mcnemar.p_value, 1.0);
  for (std::size_t i = 0; i < cmp.letter.records.size(); ++i) {
    EXPECT_EQ(cmp.letter.records[i].logits, cmp.space.records[i].logits);
  }
}

TEST(CompareStrategies, IdenticalMockGivesNullResults) {
  const RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(always("A"));
  const ComparisonRow row = compare_strategies(cfg, in, mock).report.rows.at(0);
  EXPECT_EQ(row.accuracy_delta, 0.0);
  EXPECT_EQ(row.bootstrap.observed_delta, 0.0);
  EXPECT_EQ(row.mcnemar.p_value, 1.0);
  EXPECT_EQ(row.bootstrap.p_value, 1.0);
  EXPECT_FALSE(row.accuracy_significant);
  EXPECT_FALSE(row.ece_significant);
  EXPECT_TRUE(row.predictions_identical);
  EXPECT_FALSE(row.strategy_identical);
}

TEST(CompareStrategies, DatasetOrderDoesNotMatter) {
  const RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(three_flip_spec(in));
  const StrategyComparison base = compare_strategies(cfg, in, mock);
  EvalInputs shuffled = in;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.questions.begin(), shuffled.questions.end(), rng);
  const StrategyComparison again = compare_strategies(cfg, shuffled, mock);
  expect_same_records(base.letter, again.letter);
  EXPECT_EQ(comparison_csv(base.report), comparison_csv(again.report));
  EXPECT_EQ(base.report.rows[0].bootstrap, again.report.rows[0].bootstrap);
}

TEST(CompareStrategies, ParallelRunsMatchSequential) {
  RunConfig cfg = fixture_config();
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(three_flip_spec(in));
  const StrategyComparison seq = compare_strategies(cfg, in, mock);
  cfg.parallelism = 4;
  const StrategyComparison par = compare_strategies(cfg, in, mock);
  expect_same_records(seq.letter, par.letter);
  expect_same_records(seq.space, par.space);
  EXPECT_EQ(seq.report.rows[0].bootstrap, par.report.rows[0].bootstrap);
}

TEST(RunEval, FailsClosedAndCachesSuccesses) {
  RunConfig cfg = fixture_config();
  cfg.cache_dir = scratch_dir("harness-fail");
  cfg.parallelism = 3;
  const EvalInputs in = load_inputs(cfg);
  PoisonedBackend backend({"Fixture question 12?", "Fixture question 5?"});
  try {
    run_eval(cfg, in, backend);
    FAIL() << "expected a scoring failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoringFailed);
    EXPECT_THAT(e.example_ids(), ElementsAre("q05", "q12"));
  }
  std::size_t cached = 0;
  for (const auto& f : std::filesystem::directory_iterator(cfg.cache_dir)) {
    (void)f;
    ++cached;
  }
  EXPECT_EQ(cached, 18u);

  // Resuming with a healthy backend only scores the two missing examples.
  MockBackend mock(always("B"));
  const RunOutput out = run_eval(cfg, in, mock);
  EXPECT_EQ(mock.call_count(), 2u);
  EXPECT_EQ(out.cache_hits, 18u);
}

TEST(RunEval, RefusesCacheEntryFromDifferentRequests) {
  RunConfig cfg = fixture_config();
  cfg.cache_dir = scratch_dir("harness-conflict");
  const EvalInputs in = load_inputs(cfg);
  const ResultCache cache(cfg.cache_dir);
  CacheKey key{in.dataset_id, "q07", cfg.model_id,
               template_fingerprint(in.prompt_template), cfg.strategy,
               cfg.shots, cfg.seed, cfg.cot, cfg.permutation_tag};
  cache.put({key, "not-the-signature", {0.0, 0.0, 0.0, 0.0}, std::nullopt});
  MockBackend mock(always("B"));
  try {
    run_eval(cfg, in, mock);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoringFailed);
    EXPECT_THAT(e.example_ids(), ElementsAre("q07"));
    EXPECT_THAT(e.what(), ::testing::HasSubstr("cache_conflict"));
  }
}

TEST(RunEval, ChainOfThoughtGeneratesThenScores) {
  RunConfig cfg = fixture_config();
  cfg.cot = true;
  cfg.cache_dir = scratch_dir("harness-cot");
  const EvalInputs in = load_inputs(cfg);
  MockBackendSpec spec = always("C");
  spec.set_generation(MockBackendSpec::kAnyPrompt,
                      "Option c fits best.\nAnswer: C");
  MockBackend mock(spec);
  const RunOutput out = run_eval(cfg, in, mock);
  EXPECT_EQ(mock.call_count(), 40u);
  ASSERT_TRUE(out.records[0].generated.has_value());
  EXPECT_EQ(*out.records[0].generated, "Option c fits best.\n");
  for (const auto& r : out.records) EXPECT_EQ(r.result.predicted_index, 2u);

  MockBackend warm(spec);
  const RunOutput again = run_eval(cfg, in, warm);
  EXPECT_EQ(warm.call_count(), 0u);
  EXPECT_EQ(again.records[0].generated, out.records[0].generated);
}

TEST(RunEval, FewShotUsesExemplars) {
  RunConfig cfg = fixture_config();
  cfg.shots = 3;
  cfg.exemplar_path = data_path("datasets/exemplars.jsonl");
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(always("A"));
  const RunOutput few = run_eval(cfg, in, mock);
  cfg.shots = 0;
  const RunOutput zero = run_eval(cfg, load_inputs(cfg), mock);
  EXPECT_NE(few.records[0].request_signature, zero.records[0].request_signature);
}

TEST(SelectExemplars, DeterministicSameSubjectAndNeverSelf) {
  const auto pool = load_dataset(data_path("datasets/exemplars.jsonl"));
  Question q;
  q.id = "dev03";
  q.subject = "nonexistent";
  const auto a = select_exemplars(q, pool, 5, 11);
  const auto b = select_exemplars(q, pool, 5, 11);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a, b);
  std::set<std::string> ids;
  for (const auto& e : a) {
    EXPECT_NE(e.id, "dev03");
    ids.insert(e.id);
  }
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_NE(select_exemplars(q, pool, 5, 12), a);

  std::vector<Question> tagged = pool;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    tagged[i].subject = i < 6 ? "physics" : "history";
  }
  q.subject = "physics";
  for (const auto& e : select_exemplars(q, tagged, 4, 1)) {
    EXPECT_EQ(e.subject, "physics");
  }
  EXPECT_MCQA_ERROR(select_exemplars(q, tagged, 12, 1), ErrorCode::kConfig);
  EXPECT_TRUE(select_exemplars(q, tagged, 0, 1).empty());
}

TEST(PlanScoreRequests, GroupsByLabelPrefix) {
  const TokenizerModel tok = load_vocab(data_path("vocab/marker.vocab"));
  Question q;
  q.id = "x";
  q.stem = "Q?";
  q.options = {"a", "b", "c", "d"};
  const PromptTemplate t = apply_variation(base_template(), Variation::kNumbers);
  const RenderedPrompt r =
      render_prompt(q, t, TokenizationStrategy::kSpaceLetter);
  const auto labels = resolve_label_tokens(tok, r.labels,
                                           TokenizationStrategy::kSpaceLetter);
  const auto plan = plan_score_requests(r, labels, tok);
  ASSERT_EQ(plan.size(), 1u);
  EXPECT_EQ(plan[0].request.prompt, r.text + " ");
  EXPECT_THAT(plan[0].request.candidates, ElementsAre("1", "2", "3", "4"));
  EXPECT_THAT(plan[0].options, ElementsAre(0, 1, 2, 3));

  const RenderedPrompt letters =
      render_prompt(q, base_template(), TokenizationStrategy::kSpaceLetter);
  const auto fused = resolve_label_tokens(
      tok, letters.labels, TokenizationStrategy::kSpaceLetter);
  const auto single = plan_score_requests(letters, fused, tok);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].request.prompt, letters.text);
  EXPECT_THAT(single[0].request.candidates, ElementsAre(" A", " B", " C", " D"));
}

TEST(PairRuns, MismatchedExampleSetsFail) {
  const RunConfig cfg = fixture_config();
  EvalInputs in = load_inputs(cfg);
  MockBackend mock(always("A"));
  const RunOutput full = run_eval(cfg, in, mock);
  in.questions.pop_back();
  const RunOutput partial = run_eval(cfg, in, mock);
  EXPECT_MCQA_ERROR(pair_runs(full, partial), ErrorCode::kPairingMismatch);
  RunOutput renamed = full;
  renamed.records[4].example_id = "zz";
  EXPECT_MCQA_ERROR(pair_runs(full, renamed), ErrorCode::kPairingMismatch);
}

TEST(Leaderboard, PublishedAccuraciesFlipTheTopModel) {
  const auto runs =
      load_leaderboard_input(data_path("leaderboard/published_accuracies.json"));
  ASSERT_EQ(runs.size(), 15u);
  const LeaderboardReport r = leaderboard(runs);
  EXPECT_EQ(r.top_letter, "Llama 3.1 70B Instruct");
  EXPECT_EQ(r.top_space, "Qwen 2.5 72B");
  EXPECT_TRUE(r.rank_flip);
  EXPECT_EQ(percent(r.ranking_letter[0].accuracy), "82.31");
  EXPECT_EQ(percent(r.ranking_space[0].accuracy), "83.24");
  EXPECT_EQ(r.ranking_letter.back().model_id, "GPT Neo 2.7B");
}

TEST(Leaderboard, TiesBreakLexicographically) {
  RunResult same;
  same.accuracy = 0.5;
  const std::vector<ModelRuns> runs = {{"zeta", same, same},
                                       {"alpha", same, same}};
  const LeaderboardReport r = leaderboard(runs);
  EXPECT_FALSE(r.rank_flip);
  EXPECT_EQ(r.top_letter, "alpha");
  EXPECT_EQ(r.ranking_space[1].model_id, "zeta");
}

TEST(Leaderboard, Preconditions) {
  RunResult x;
  const std::vector<ModelRuns> single = {{"only", x, x}};
  EXPECT_MCQA_ERROR(leaderboard(single), ErrorCode::kInvalidArgument);
  const std::vector<ModelRuns> missing = {{"a", x, x}, {"b", x, std::nullopt}};
  EXPECT_MCQA_ERROR(leaderboard(missing), ErrorCode::kMissingStrategy);
  const std::vector<ModelRuns> twice = {{"a", x, x}, {"a", x, x}};
  EXPECT_MCQA_ERROR(leaderboard(twice), ErrorCode::kInvalidArgument);
}

TEST(PermutationSuite, PositionZeroMockTracksGoldPlacement) {
  RunConfig cfg = fixture_config();
  cfg.bootstrap_iterations = 200;
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(always("A"));
  const PermutationSuiteReport r = run_permutation_suite(cfg, in, mock, 5, 21);
  ASSERT_EQ(r.per_permutation.size(), 5u);
  ASSERT_EQ(r.permutations.size(), 1u);
  const auto& perms = r.permutations[0].second;
  double sum = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    std::size_t at_zero = 0;
    for (const auto& q : in.questions) at_zero += perms[k][0] == q.gold_index;
    const double expected = static_cast<double>(at_zero) / 20.0;
    EXPECT_EQ(r.per_permutation[k].rows[0].letter.accuracy, expected);
    EXPECT_EQ(r.per_permutation[k].rows[0].space.accuracy, expected);
    sum += expected;
  }
  EXPECT_DOUBLE_EQ(r.mean_accuracy_letter, sum / 5.0);
}

TEST(PermutationSuite, TextFollowingMockIsPermutationInvariant) {
  RunConfig cfg = fixture_config();
  cfg.bootstrap_iterations = 200;
  const EvalInputs in = load_inputs(cfg);
  // Score the gold option's label highest wherever the shuffle puts it.
  MockBackendSpec spec;
  for (const auto& perm : generate_permutations(4, 3, 5)) {
    for (const auto& q : in.questions) {
      const Question p = permute_options(q, perm);
      for (auto s : {TokenizationStrategy::kLetterOnly,
                     TokenizationStrategy::kSpaceLetter}) {
        const RenderedPrompt rp = render_prompt(p, in.prompt_template, s);
        spec.set_score(rp.text, rp.candidate_surfaces[p.gold_index], 4.0);
      }
    }
  }
  MockBackend mock(spec);
  const PermutationSuiteReport r = run_permutation_suite(cfg, in, mock, 3, 5);
  for (const auto& rep : r.per_permutation) {
    EXPECT_EQ(rep.rows[0].letter.accuracy, 1.0);
    EXPECT_EQ(rep.rows[0].space.accuracy, 1.0);
  }
  EXPECT_EQ(r.mean_accuracy_letter, 1.0);
}

TEST(PermutationSuite, SeededRerunsAreIdentical) {
  RunConfig cfg = fixture_config();
  cfg.bootstrap_iterations = 200;
  const EvalInputs in = load_inputs(cfg);
  MockBackend mock(three_flip_spec(in));
  const auto a = run_permutation_suite(cfg, in, mock, 5, 9);
  const auto b = run_permutation_suite(cfg, in, mock, 5, 9);
  EXPECT_EQ(a.permutations, b.permutations);
  EXPECT_EQ(permutation_suite_json(a), permutation_suite_json(b));
  EXPECT_MCQA_ERROR(run_permutation_suite(cfg, in, mock, 0, 9),
                    ErrorCode::kInvalidArgument);
}

TEST(Validate, ReportsConfigErrors) {
  RunConfig cfg = fixture_config();
  EXPECT_MCQA_ERROR(validate(cfg), ErrorCode::kConfig);  // no mock spec
  validate_inputs(cfg);
  cfg.dataset_path = data_path("datasets/absent.jsonl");
  EXPECT_MCQA_ERROR(validate_inputs(cfg), ErrorCode::kConfig);
  cfg = fixture_config();
  cfg.parallelism = 0;
  EXPECT_MCQA_ERROR(validate_inputs(cfg), ErrorCode::kConfig);
  cfg = fixture_config();
  cfg.shots = 2;
  EXPECT_MCQA_ERROR(validate_inputs(cfg), ErrorCode::kConfig);
  cfg = fixture_config();
  cfg.language = "de";
  EXPECT_MCQA_ERROR(load_inputs(cfg), ErrorCode::kConfig);
  cfg.template_pack = ::mcqa::testing::templates_path("de.json");
  EXPECT_EQ(load_inputs(cfg).prompt_template.language, "de");
}

}  // namespace
}  // namespace mcqa
