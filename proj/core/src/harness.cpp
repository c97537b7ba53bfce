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
#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "mcqa/cache.hpp"
#include "mcqa/dataset.hpp"
#include "mcqa/error.hpp"
#include "mcqa/fingerprint.hpp"
#include "mcqa/rng.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

std::uint64_t seed_from_text(std::uint64_t seed, std::string_view text) {
  const std::string digest = sha256_hex(text);
  return seed ^ std::stoull(digest.substr(0, 16), nullptr, 16);
}

void require_file(const std::filesystem::path& p, const char* what) {
  if (!std::filesystem::is_regular_file(p)) {
    throw Error(ErrorCode::kConfig,
                std::string(what) + " not found: '" + p.string() + "'");
  }
}

std::size_t max_option_count(std::span<const Question> qs) {
  std::size_t n = 0;
  for (const auto& q : qs) n = std::max(n, q.options.size());
  return n;
}

// Counts calls made through it so run reports can state how many requests
// actually reached the model.
class CountingBackend {
 public:
  explicit CountingBackend(ScoringBackend& inner) : inner_(inner) {}

  ScoreResponse score(const ScoreRequest& req) {
    ++calls_;
    return inner_.score_candidates(req);
  }
  std::string generate(std::string_view prompt, int max_tokens,
                       const std::vector<std::string>& stop) {
    ++calls_;
    return inner_.generate_greedy(prompt, max_tokens, stop);
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  ScoringBackend& inner_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace

std::unique_ptr<ScoringBackend> make_backend(const BackendDescriptor& d) {
  if (d.kind == BackendDescriptor::Kind::kMock) {
    return std::make_unique<MockBackend>(load_mock_spec(d.mock_spec));
  }
  return std::make_unique<HttpBackend>(d.endpoint);
}

void validate_inputs(const RunConfig& cfg) {
  require_file(cfg.dataset_path, "dataset");
  require_file(cfg.vocab_path, "vocabulary");
  if (!cfg.template_pack.empty()) require_file(cfg.template_pack, "template pack");
  if (cfg.shots > 0) require_file(cfg.exemplar_path, "exemplar split");
  if (cfg.parallelism < 1) {
    throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  }
  if (cfg.num_bins < 1) throw Error(ErrorCode::kConfig, "bins must be >= 1");
  if (cfg.bootstrap_iterations < 1) {
    throw Error(ErrorCode::kConfig, "bootstrap iterations must be >= 1");
  }
  if (cfg.cot && cfg.cot_max_tokens < 1) {
    throw Error(ErrorCode::kConfig, "CoT max tokens must be >= 1");
  }
  if (cfg.permutations && cfg.permutations->count < 1) {
    throw Error(ErrorCode::kConfig, "permutation count must be >= 1");
  }
}

void validate(const RunConfig& cfg) {
  validate_inputs(cfg);
  if (cfg.model_id.empty()) {
    throw Error(ErrorCode::kConfig, "model id must be set");
  }
  if (cfg.backend.kind == BackendDescriptor::Kind::kMock) {
    require_file(cfg.backend.mock_spec, "mock spec");
  } else if (cfg.backend.endpoint.base_url.empty()) {
    throw Error(ErrorCode::kConfig, "endpoint backend needs an address");
  }
}

PromptTemplate resolve_template(const RunConfig& cfg, std::size_t n_options) {
  PromptTemplate t;
  if (!cfg.template_pack.empty()) {
    const auto pack = load_language_pack(cfg.template_pack);
    auto it = pack.find(cfg.template_id);
    if (it == pack.end()) {
      throw Error(ErrorCode::kConfig, "template '" + cfg.template_id +
                                          "' not in pack " +
                                          cfg.template_pack.string());
    }
    t = it->second;
  } else if (cfg.language != "en") {
    throw Error(ErrorCode::kConfig,
                "language '" + cfg.language + "' needs a template pack");
  } else if (cfg.template_id == "base") {
    t = base_template();
  } else if (cfg.template_id == "instruct") {
    t = instruct_template();
  } else {
    throw Error(ErrorCode::kConfig,
                "unknown built-in template '" + cfg.template_id + "'");
  }
  if (cfg.roles) {
    if (!t.roles) {
      throw Error(ErrorCode::kConfig, "template '" + t.template_id +
                                          "' has no role markers to override");
    }
    const std::string system_text = cfg.roles->system_text.empty()
                                        ? t.roles->system_text
                                        : cfg.roles->system_text;
    t.roles = *cfg.roles;
    t.roles->system_text = system_text;
  }
  if (cfg.variation) t = apply_variation(t, *cfg.variation, n_options);
  return t;
}

EvalInputs load_inputs(const RunConfig& cfg) {
  validate_inputs(cfg);
  EvalInputs in;
  in.questions = load_dataset(cfg.dataset_path);
  if (in.questions.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "dataset " + cfg.dataset_path.string() + " has no questions");
  }
  if (cfg.shots > 0) in.exemplar_pool = load_dataset(cfg.exemplar_path);
  in.tokenizer = std::make_shared<const TokenizerModel>(load_vocab(cfg.vocab_path));
  in.dataset_id = cfg.dataset_id.empty() ? cfg.dataset_path.stem().string()
                                         : cfg.dataset_id;
  in.prompt_template = resolve_template(cfg, max_option_count(in.questions));
  return in;
}

std::vector<Question> select_exemplars(const Question& q,
                                       std::span<const Question> pool,
                                       std::size_t shots, std::uint64_t seed) {
  if (shots == 0) return {};
  std::vector<const Question*> all;
  std::vector<const Question*> same_subject;
  for (const auto& ex : pool) {
    if (ex.id == q.id) continue;
    all.push_back(&ex);
    if (q.subject && ex.subject == q.subject) same_subject.push_back(&ex);
  }
  auto& candidates = same_subject.size() >= shots ? same_subject : all;
  if (candidates.size() < shots) {
    throw Error(ErrorCode::kConfig,
                "exemplar split has " + std::to_string(candidates.size()) +
                    " usable items; " + std::to_string(shots) + " requested");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Question* a, const Question* b) { return a->id < b->id; });
  const std::string subject =
      &candidates == &same_subject ? q.subject.value_or("") : "";
  std::mt19937_64 engine(seed_from_text(seed, subject));
  for (std::size_t i = 0; i < shots; ++i) {
    const auto j = i + static_cast<std::size_t>(
                           uniform_below(engine, candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  std::vector<Question> out;
  out.reserve(shots);
  for (std::size_t i = 0; i < shots; ++i) out.push_back(*candidates[i]);
  return out;
}

std::vector<PlannedRequest> plan_score_requests(const RenderedPrompt& rendered,
                                                const LabelTokenSet& labels,
                                                const TokenizerModel& tokenizer) {
  if (labels.size() != rendered.candidate_surfaces.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "label token set does not match the rendered options");
  }
  std::vector<PlannedRequest> plan;
  std::map<std::string, std::size_t> by_prefix;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& tokens = labels[i].tokens;
    const std::string prefix = tokenizer.to_plain_text(tokenizer.decode(
        std::span<const TokenId>(tokens).first(tokens.size() - 1)));
    const std::string candidate =
        tokenizer.to_plain_text(tokenizer.surface(tokens.back()));
    auto [it, inserted] = by_prefix.emplace(prefix, plan.size());
    if (inserted) {
      PlannedRequest p;
      p.request.prompt = rendered.text + prefix;
      p.request.prompt_segments = rendered.segments;
      if (!prefix.empty()) p.request.prompt_segments.push_back(prefix);
      plan.push_back(std::move(p));
    }
    PlannedRequest& p = plan[it->second];
    if (std::find(p.request.candidates.begin(), p.request.candidates.end(),
                  candidate) != p.request.candidates.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "labels '" + labels[i].label +
                      "' and another option resolve to the same scored token");
    }
    p.request.candidates.push_back(candidate);
    p.options.push_back(i);
  }
  return plan;
}

std::string request_signature(std::span<const PlannedRequest> plan) {
  json j = json::array();
  for (const auto& p : plan) {
    j.push_back({{"prompt", p.request.prompt},
                 {"candidates", p.request.candidates},
                 {"options", p.options}});
  }
  return sha256_hex(j.dump());
}

RunOutput run_eval(const RunConfig& cfg, const EvalInputs& inputs,
                   ScoringBackend& backend) {
  const PromptTemplate& tmpl = inputs.prompt_template;
  const TokenizerModel& tokenizer = *inputs.tokenizer;
  const std::string tmpl_fp = template_fingerprint(tmpl);

  std::map<std::size_t, LabelTokenSet> label_sets;
  for (const auto& q : inputs.questions) {
    if (!label_sets.contains(q.options.size())) {
      const auto labels = option_labels(tmpl.label_style, q.options.size());
      label_sets.emplace(q.options.size(),
                         resolve_label_tokens(tokenizer, labels, cfg.strategy));
    }
  }
  bool multi_token = false;
  for (const auto& [n, set] : label_sets) {
    for (const auto& l : set) multi_token = multi_token || !l.single_token;
  }

  std::optional<ResultCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  CountingBackend counted(backend);
  const std::size_t n = inputs.questions.size();
  std::vector<std::optional<ExampleRecord>> records(n);
  std::vector<std::pair<std::string, std::string>> failures;
  std::mutex failures_mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> hits{0};

  auto evaluate = [&](const Question& q) {
    const auto exemplars =
        select_exemplars(q, inputs.exemplar_pool, cfg.shots, cfg.seed);
    CacheKey key{inputs.dataset_id, q.id,      cfg.model_id,
                 tmpl_fp,           cfg.strategy, cfg.shots,
                 cfg.seed,          cfg.cot,   cfg.permutation_tag};
    std::optional<CacheEntry> cached;
    if (cache) cached = cache->get(key);

    ExampleRecord rec;
    rec.example_id = q.id;
    rec.gold_index = q.gold_index;

    RenderedPrompt rendered;
    if (cfg.cot) {
      const std::string cot_prompt = render_cot_prompt(q, tmpl, exemplars);
      if (cached) {
        if (!cached->generated) {
          throw Error(ErrorCode::kCacheConflict,
                      "cached entry for '" + q.id + "' lacks CoT text");
        }
        rec.generated = cached->generated;
      } else {
        rec.generated =
            counted.generate(cot_prompt, cfg.cot_max_tokens, {tmpl.answer_cue});
      }
      rendered = complete_cot_prompt(q, tmpl, cfg.strategy, cot_prompt,
                                     *rec.generated, exemplars.size());
    } else {
      rendered = render_prompt(q, tmpl, cfg.strategy, exemplars);
    }

    const auto& labels = label_sets.at(q.options.size());
    const auto plan = plan_score_requests(rendered, labels, tokenizer);
    rec.request_signature = request_signature(plan);
    rec.multi_token_labels = std::any_of(
        labels.begin(), labels.end(), [](const auto& l) { return !l.single_token; });

    if (cached) {
      if (cached->request_signature != rec.request_signature ||
          cached->logits.size() != q.options.size()) {
        throw Error(ErrorCode::kCacheConflict,
                    "cache entry for '" + q.id +
                        "' was produced from different requests");
      }
      rec.logits = cached->logits;
      rec.from_cache = true;
      ++hits;
    } else {
      rec.logits.assign(q.options.size(), 0.0);
      for (const auto& p : plan) {
        const ScoreResponse resp = counted.score(p.request);
        for (std::size_t j = 0; j < p.options.size(); ++j) {
          rec.logits[p.options[j]] = resp.logits[j];
        }
      }
      if (cache) {
        cache->put({key, rec.request_signature, rec.logits, rec.generated});
      }
    }
    rec.result = score_example(q.id, rec.logits, q.gold_index);
    return rec;
  };

  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= n) return;
      const Question& q = inputs.questions[i];
      try {
        records[i] = evaluate(q);
      } catch (const Error& e) {
        std::lock_guard lock(failures_mu);
        failures.emplace_back(q.id, std::string(to_string(e.code())) + ": " +
                                        e.what());
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.parallelism, 1, n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::vector<std::string> ids;
    std::string message = std::to_string(failures.size()) +
                          " example(s) failed to score:";
    for (const auto& [id, what] : failures) {
      ids.push_back(id);
      message += "\n  " + id + ": " + what;
    }
    throw Error(ErrorCode::kScoringFailed, message)
        .with_example_ids(std::move(ids));
  }

  RunOutput out;
  out.records.reserve(n);
  for (auto& r : records) out.records.push_back(std::move(*r));
  std::sort(out.records.begin(), out.records.end(),
            [](const auto& a, const auto& b) { return a.example_id < b.example_id; });
  std::vector<ExampleResult> results;
  results.reserve(n);
  for (const auto& r : out.records) results.push_back(r.result);
  out.result = summarize(results, cfg.num_bins);
  out.result.strategy = std::string(to_string(cfg.strategy));
  out.result.template_id = tmpl.template_id;
  out.result.model_id = cfg.model_id;
  out.result.dataset_id = inputs.dataset_id;
  out.backend_calls = counted.calls();
  out.cache_hits = hits.load();
  out.multi_token_labels = multi_token;
  return out;
}

std::vector<PairedOutcome> pair_runs(const RunOutput& letter,
                                     const RunOutput& space) {
  std::unordered_map<std::string, const ExampleRecord*> by_id;
  for (const auto& r : space.records) by_id.emplace(r.example_id, &r);
  if (letter.records.size() != space.records.size()) {
    throw Error(ErrorCode::kPairingMismatch,
                "strategy runs cover different example sets (" +
                    std::to_string(letter.records.size()) + " vs " +
                    std::to_string(space.records.size()) + ")");
  }
  std::vector<PairedOutcome> pairs;
  pairs.reserve(letter.records.size());
  for (const auto& a : letter.records) {
    auto it = by_id.find(a.example_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kPairingMismatch,
                  "example '" + a.example_id + "' missing from space-letter run")
          .with_example_ids({a.example_id});
    }
    const ExampleRecord& b = *it->second;
    pairs.push_back({a.example_id, a.result.correct, b.result.correct,
                     a.result.confidence, b.result.confidence,
                     a.result.predicted_index, b.result.predicted_index});
  }
  return pairs;
}

ComparisonRow make_comparison_row(const RunConfig& cfg, const RunOutput& letter,
                                  const RunOutput& space) {
  const auto pairs = pair_runs(letter, space);
  ComparisonRow row;
  row.model_id = cfg.model_id;
  row.letter = letter.result;
  row.space = space.result;
  row.mcnemar = mcnemar(pairs, cfg.sidedness);
  row.accuracy_delta = (static_cast<double>(row.mcnemar.b) -
                        static_cast<double>(row.mcnemar.c)) /
                       static_cast<double>(pairs.size());
  row.bootstrap = paired_bootstrap_ece(pairs, cfg.bootstrap_iterations,
                                       cfg.bootstrap_seed, cfg.num_bins,
                                       cfg.parallelism);
  row.accuracy_significant = is_significant(row.mcnemar.p_value);
  row.ece_significant = is_significant(row.bootstrap.p_value);
  row.predictions_identical = std::all_of(
      pairs.begin(), pairs.end(),
      [](const auto& p) { return p.predicted_a == p.predicted_b; });
  // Records are sorted by id on both sides and pair_runs checked the sets.
  row.strategy_identical = true;
  for (std::size_t i = 0; i < letter.records.size(); ++i) {
    if (letter.records[i].request_signature !=
        space.records[i].request_signature) {
      row.strategy_identical = false;
      break;
    }
  }
  row.multi_token_labels = letter.multi_token_labels || space.multi_token_labels;
  row.cot = cfg.cot;
  return row;
}

StrategyComparison compare_strategies(const RunConfig& cfg,
                                      const EvalInputs& inputs,
                                      ScoringBackend& backend) {
  RunConfig a = cfg;
  a.strategy = TokenizationStrategy::kLetterOnly;
  RunConfig b = cfg;
  b.strategy = TokenizationStrategy::kSpaceLetter;

  StrategyComparison out;
  out.letter = run_eval(a, inputs, backend);
  out.space = run_eval(b, inputs, backend);
  out.pairs = pair_runs(out.letter, out.space);
  out.report.rows.push_back(make_comparison_row(cfg, out.letter, out.space));
  out.report.dataset_id = inputs.dataset_id;
  out.report.template_id = inputs.prompt_template.template_id;
  out.report.shots = cfg.shots;
  out.report.cot = cfg.cot;
  out.report.bootstrap_iterations = cfg.bootstrap_iterations;
  out.report.bootstrap_seed = cfg.bootstrap_seed;
  out.report.sidedness = cfg.sidedness;
  return out;
}

LeaderboardReport leaderboard(std::span<const ModelRuns> runs) {
  if (runs.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a leaderboard needs at least two models");
  }
  LeaderboardReport out;
  std::set<std::string> seen;
  for (const auto& m : runs) {
    if (!seen.insert(m.model_id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model '" + m.model_id + "' listed twice");
    }
    if (!m.letter || !m.space) {
      throw Error(ErrorCode::kMissingStrategy,
                  "model '" + m.model_id + "' lacks a " +
                      (m.letter ? "space-letter" : "letter") + " run");
    }
    out.ranking_letter.push_back({m.model_id, m.letter->accuracy});
    out.ranking_space.push_back({m.model_id, m.space->accuracy});
  }
  auto by_rank = [](const LeaderboardEntry& x, const LeaderboardEntry& y) {
    if (x.accuracy != y.accuracy) return x.accuracy > y.accuracy;
    return x.model_id < y.model_id;
  };
  std::stable_sort(out.ranking_letter.begin(), out.ranking_letter.end(), by_rank);
  std::stable_sort(out.ranking_space.begin(), out.ranking_space.end(), by_rank);
  out.top_letter = out.ranking_letter.front().model_id;
  out.top_space = out.ranking_space.front().model_id;
  out.rank_flip = out.top_letter != out.top_space;
  return out;
}

PermutationSuiteReport run_permutation_suite(const RunConfig& cfg,
                                             const EvalInputs& inputs,
                                             ScoringBackend& backend,
                                             std::size_t count,
                                             std::uint64_t seed) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "permutation count must be >= 1");
  }
  PermutationSuiteReport out;
  std::map<std::size_t, std::vector<Permutation>> perms;
  for (const auto& q : inputs.questions) {
    if (!perms.contains(q.options.size())) {
      perms.emplace(q.options.size(),
                    generate_permutations(q.options.size(), count, seed));
    }
  }
  out.permutations.assign(perms.begin(), perms.end());

  for (std::size_t k = 0; k < count; ++k) {
    EvalInputs permuted = inputs;
    for (auto& q : permuted.questions) {
      q = permute_options(q, perms.at(q.options.size())[k]);
    }
    RunConfig c = cfg;
    c.permutation_tag =
        "seed=" + std::to_string(seed) + "/k=" + std::to_string(k);
    auto cmp = compare_strategies(c, permuted, backend);
    const ComparisonRow& row = cmp.report.rows.front();
    out.mean_accuracy_letter += row.letter.accuracy;
    out.mean_accuracy_space += row.space.accuracy;
    out.mean_ece_letter += row.letter.ece;
    out.mean_ece_space += row.space.ece;
    if (row.accuracy_significant) ++out.accuracy_significant_count;
    if (row.ece_significant) ++out.ece_significant_count;
    out.per_permutation.push_back(std::move(cmp.report));
  }
  const double k = static_cast<double>(count);
  out.mean_accuracy_letter /= k;
  out.mean_accuracy_space /= k;
  out.mean_ece_letter /= k;
  out.mean_ece_space /= k;
  return out;
}

}  // namespace mcqa
