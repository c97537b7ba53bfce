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

// mcqa: command-line front end for the evaluation harness.
//
// Exit codes: 0 success, 1 failed self-check, 2 harness error, other values
// come from argument parsing.

#include <algorithm>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcqa/config.hpp"
#include "mcqa/dataset.hpp"
#include "mcqa/error.hpp"
#include "mcqa/harness.hpp"
#include "mcqa/http_backend.hpp"
#include "mcqa/report.hpp"
#include "mcqa/version.hpp"
#include "selfcheck.hpp"

namespace mcqa::cli {
namespace {

namespace fs = std::filesystem;

struct ConfigFlags {
  std::string config;
  std::string dataset;
  std::string vocab;
  std::string model;
  std::string backend;
  std::string mock_spec;
  std::string endpoint;
  std::string api_style;
  std::string token_env;
  std::string template_id;
  std::string variation;
  std::string language;
  std::string template_pack;
  std::string strategy;
  std::size_t shots = 0;
  std::string exemplars;
  std::uint64_t seed = 0;
  bool cot = false;
  std::string sidedness;
  std::size_t bins = 10;
  std::size_t bootstrap_iterations = 0;
  std::uint64_t bootstrap_seed = 0;
  std::size_t parallelism = 1;
  std::string cache_dir;
};

void add_config_flags(CLI::App* app, ConfigFlags& f, bool with_strategy) {
  app->add_option("--config", f.config, "Run configuration file (JSON)");
  app->add_option("--dataset", f.dataset, "Dataset file (JSONL)");
  app->add_option("--vocab", f.vocab, "Exported tokenizer vocabulary");
  app->add_option("--model", f.model, "Model id recorded in reports");
  app->add_option("--backend", f.backend, "Scoring backend")
      ->check(CLI::IsMember({"mock", "endpoint"}));
  app->add_option("--mock-spec", f.mock_spec, "Mock score table (JSON)");
  app->add_option("--endpoint", f.endpoint, "Server base URL");
  app->add_option("--api-style", f.api_style, "Endpoint protocol")
      ->check(CLI::IsMember({"native", "echo-logprobs"}));
  app->add_option("--token-env", f.token_env,
                  "Environment variable holding a bearer token");
  app->add_option("--template", f.template_id, "Template id (base|instruct)");
  app->add_option("--variation", f.variation, "Prompt variation");
  app->add_option("--language", f.language, "Template language");
  app->add_option("--template-pack", f.template_pack, "Language pack (JSON)");
  if (with_strategy) {
    app->add_option("--strategy", f.strategy, "Answer tokenization")
        ->check(CLI::IsMember({"letter", "space-letter"}));
  }
  app->add_option("--shots", f.shots, "Few-shot exemplars per question");
  app->add_option("--exemplars", f.exemplars, "Exemplar pool (JSONL)");
  app->add_option("--seed", f.seed, "Exemplar draw seed");
  app->add_flag("--cot", f.cot, "Chain-of-thought before scoring");
  app->add_option("--sidedness", f.sidedness, "McNemar alternative")
      ->check(CLI::IsMember({"one-sided", "two-sided"}));
  app->add_option("--bins", f.bins, "Calibration bins")
      ->check(CLI::PositiveNumber);
  app->add_option("--bootstrap-iterations", f.bootstrap_iterations,
                  "Paired bootstrap iterations")
      ->check(CLI::PositiveNumber);
  app->add_option("--bootstrap-seed", f.bootstrap_seed, "Bootstrap seed");
  app->add_option("--parallelism", f.parallelism, "Concurrent requests")
      ->check(CLI::PositiveNumber);
  app->add_option("--cache-dir", f.cache_dir, "Result cache directory");
}

bool given(const CLI::App* app, const char* name) {
  return app->count(name) > 0;
}

// Config file first, then flags given on the command line.
RunConfig build_config(const CLI::App* app, const ConfigFlags& f,
                       bool needs_backend = true) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (given(app, "--dataset")) cfg.dataset_path = f.dataset;
  if (given(app, "--vocab")) cfg.vocab_path = f.vocab;
  if (given(app, "--model")) cfg.model_id = f.model;
  if (given(app, "--backend")) {
    cfg.backend.kind = f.backend == "mock" ? BackendDescriptor::Kind::kMock
                                           : BackendDescriptor::Kind::kEndpoint;
  }
  if (given(app, "--mock-spec")) cfg.backend.mock_spec = f.mock_spec;
  if (given(app, "--endpoint")) cfg.backend.endpoint.base_url = f.endpoint;
  if (given(app, "--api-style")) {
    cfg.backend.endpoint.api_style = parse_api_style(f.api_style);
  }
  if (!cfg.model_id.empty() && cfg.backend.endpoint.model.empty()) {
    cfg.backend.endpoint.model = cfg.model_id;
  }
  if (given(app, "--token-env")) {
    const char* v = std::getenv(f.token_env.c_str());
    if (v == nullptr) {
      throw Error(ErrorCode::kConfig, "environment variable " + f.token_env +
                                          " is not set");
    }
    cfg.backend.endpoint.bearer_token = v;
  }
  if (given(app, "--template")) cfg.template_id = f.template_id;
  if (given(app, "--variation")) cfg.variation = parse_variation(f.variation);
  if (given(app, "--language")) cfg.language = f.language;
  if (given(app, "--template-pack")) cfg.template_pack = f.template_pack;
  if (app->get_option_no_throw("--strategy") != nullptr &&
      given(app, "--strategy")) {
    cfg.strategy = parse_strategy(f.strategy);
  }
  if (given(app, "--shots")) cfg.shots = f.shots;
  if (given(app, "--exemplars")) cfg.exemplar_path = f.exemplars;
  if (given(app, "--seed")) cfg.seed = f.seed;
  if (given(app, "--cot")) cfg.cot = f.cot;
  if (given(app, "--sidedness")) cfg.sidedness = parse_sidedness(f.sidedness);
  if (given(app, "--bins")) cfg.num_bins = f.bins;
  if (given(app, "--bootstrap-iterations")) {
    cfg.bootstrap_iterations = f.bootstrap_iterations;
  }
  if (given(app, "--bootstrap-seed")) cfg.bootstrap_seed = f.bootstrap_seed;
  if (given(app, "--parallelism")) cfg.parallelism = f.parallelism;
  if (given(app, "--cache-dir")) cfg.cache_dir = f.cache_dir;
  if (needs_backend) {
    validate(cfg);
  } else {
    validate_inputs(cfg);
  }
  return cfg;
}

// Writes `text` to out_dir/name when an output directory is set.
void emit(const std::string& out_dir, const std::string& name,
          const std::string& text) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / name, text);
}

std::string run_stem(const RunConfig& cfg, const EvalInputs& in) {
  return in.dataset_id + "_" + (cfg.model_id.empty() ? "model" : cfg.model_id) +
         "_" + std::string(to_string(cfg.strategy));
}

int cmd_run(const CLI::App* app, const ConfigFlags& f, const std::string& out) {
  const RunConfig cfg = build_config(app, f);
  const EvalInputs in = load_inputs(cfg);
  const auto backend = make_backend(cfg.backend);
  const RunOutput run = run_eval(cfg, in, *backend);
  const std::string stem = run_stem(cfg, in);
  emit(out, stem + ".json", run_report_json(cfg, run));
  emit(out, stem + "_reliability.csv", reliability_csv(run.result.bins));
  std::printf("%s  n=%zu  accuracy=%s  ece=%s  backend_calls=%zu  cache_hits=%zu\n",
              std::string(to_string(cfg.strategy)).c_str(), run.result.n,
              percent(run.result.accuracy).c_str(),
              percent(run.result.ece).c_str(), run.backend_calls,
              run.cache_hits);
  return 0;
}

int cmd_compare(const CLI::App* app, const ConfigFlags& f,
                const std::string& out) {
  const RunConfig cfg = build_config(app, f);
  const EvalInputs in = load_inputs(cfg);
  const auto backend = make_backend(cfg.backend);
  const StrategyComparison cmp = compare_strategies(cfg, in, *backend);
  const std::string stem = in.dataset_id + "_" +
                           (cfg.model_id.empty() ? "model" : cfg.model_id);
  RunConfig letter_cfg = cfg;
  letter_cfg.strategy = TokenizationStrategy::kLetterOnly;
  RunConfig space_cfg = cfg;
  space_cfg.strategy = TokenizationStrategy::kSpaceLetter;
  emit(out, run_stem(letter_cfg, in) + ".json",
       run_report_json(letter_cfg, cmp.letter));
  emit(out, run_stem(space_cfg, in) + ".json",
       run_report_json(space_cfg, cmp.space));
  emit(out, run_stem(letter_cfg, in) + "_reliability.csv",
       reliability_csv(cmp.letter.result.bins));
  emit(out, run_stem(space_cfg, in) + "_reliability.csv",
       reliability_csv(cmp.space.result.bins));
  emit(out, stem + "_comparison.json", comparison_report_json(cfg, cmp.report));
  emit(out, stem + "_comparison.csv", comparison_csv(cmp.report));
  const std::string table = comparison_table(cmp.report);
  emit(out, stem + "_comparison.txt", table);
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_permute(const CLI::App* app, const ConfigFlags& f, std::size_t count,
                std::uint64_t seed, const std::string& out) {
  const RunConfig cfg = build_config(app, f);
  const EvalInputs in = load_inputs(cfg);
  const auto backend = make_backend(cfg.backend);
  const PermutationSuiteReport r =
      run_permutation_suite(cfg, in, *backend, count, seed);
  const std::string stem = in.dataset_id + "_" +
                           (cfg.model_id.empty() ? "model" : cfg.model_id) +
                           "_permutations";
  const std::string table = permutation_suite_table(r);
  emit(out, stem + ".json", permutation_suite_json(r));
  emit(out, stem + ".txt", table);
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_leaderboard(const std::string& input, const std::string& out) {
  const auto runs = load_leaderboard_input(input);
  const LeaderboardReport r = leaderboard(runs);
  const std::string table = leaderboard_table(r);
  emit(out, "leaderboard.json", leaderboard_json(r));
  emit(out, "leaderboard.txt", table);
  std::fputs(table.c_str(), stdout);
  return 0;
}

Question placeholder_question() {
  return {"query", "{question}",
          {"{option A}", "{option B}", "{option C}", "{option D}"}, 0,
          std::nullopt, std::nullopt};
}

std::vector<Question> placeholder_exemplars() {
  const std::size_t golds[] = {0, 1, 2, 3, 0};
  std::vector<Question> out;
  for (int k = 1; k <= 5; ++k) {
    const std::string p = "{example " + std::to_string(k) + " ";
    out.push_back({"ex" + std::to_string(k), p + "question}",
                   {p + "option A}", p + "option B}", p + "option C}",
                    p + "option D}"},
                   golds[k - 1], std::nullopt, std::nullopt});
  }
  return out;
}

// Placeholder prompts for the built-in templates and every variation, both
// strategies, plus the five-shot base prompt.
int cmd_render_golden(const std::string& out) {
  const std::pair<const char*, PromptTemplate> cases[] = {
      {"base", base_template()},
      {"instruct", instruct_template()},
      {"space_in_option_list",
       apply_variation(base_template(), Variation::kSpaceInOptionList)},
      {"parentheses", apply_variation(base_template(), Variation::kParentheses)},
      {"numbers", apply_variation(base_template(), Variation::kNumbers)},
      {"choices_before_question",
       apply_variation(base_template(), Variation::kChoicesBeforeQuestion)},
  };
  const std::pair<TokenizationStrategy, const char*> sides[] = {
      {TokenizationStrategy::kLetterOnly, "letter"},
      {TokenizationStrategy::kSpaceLetter, "space"}};
  const Question q = placeholder_question();
  const auto exemplars = placeholder_exemplars();
  auto put = [&out](const std::string& name, const std::string& text) {
    if (out.empty()) {
      std::printf("==> %s <==\n%s\n", name.c_str(), text.c_str());
    } else {
      emit(out, name, text);
    }
  };
  for (const auto& [name, tmpl] : cases) {
    for (const auto& [s, suffix] : sides) {
      put(std::string(name) + "_" + suffix + ".txt",
          render_prompt(q, tmpl, s).text);
    }
  }
  for (const auto& [s, suffix] : sides) {
    put(std::string("base_five_shot_") + suffix + ".txt",
        render_prompt(q, base_template(), s, exemplars).text);
  }
  return 0;
}

// Prompts for the configured dataset, exactly as sent for scoring.
int cmd_render(const CLI::App* app, const ConfigFlags& f,
               const std::vector<std::string>& ids) {
  const RunConfig cfg = build_config(app, f, false);
  const EvalInputs in = load_inputs(cfg);
  for (const auto& q : in.questions) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), q.id) == ids.end()) {
      continue;
    }
    const PromptTemplate t = resolve_template(cfg, q.options.size());
    std::vector<Question> shots;
    if (cfg.shots > 0) {
      shots = select_exemplars(q, in.exemplar_pool, cfg.shots, cfg.seed);
    }
    const RenderedPrompt r = render_prompt(q, t, cfg.strategy, shots);
    std::printf("==> %s (%s) <==\n%s", q.id.c_str(),
                std::string(to_string(cfg.strategy)).c_str(), r.text.c_str());
    std::printf("\n[candidates:");
    for (const auto& c : r.candidate_surfaces) std::printf(" \"%s\"", c.c_str());
    std::printf("]\n\n");
  }
  return 0;
}

BackendServer* g_server = nullptr;

void stop_server(int) {
  if (g_server != nullptr) g_server->stop();
}

int cmd_serve_mock(const std::string& spec, const std::string& host, int port) {
  auto backend = std::make_shared<MockBackend>(load_mock_spec(spec));
  BackendServer server(backend);
  const int bound = server.bind(host, port);
  std::printf("serving %s on http://%s:%d\n", spec.c_str(), host.c_str(), bound);
  std::fflush(stdout);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.serve();
  g_server = nullptr;
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Tokenization-aware multiple-choice evaluation harness", "mcqa"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ConfigFlags run_flags, cmp_flags, perm_flags, render_flags;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "Evaluate one strategy");
  add_config_flags(run, run_flags, true);
  run->add_option("--out", out_dir, "Directory for the run report");

  CLI::App* cmp = app.add_subcommand(
      "compare", "Evaluate both strategies and test the difference");
  add_config_flags(cmp, cmp_flags, false);
  cmp->add_option("--out", out_dir, "Directory for reports");

  CLI::App* perm = app.add_subcommand(
      "permute", "Compare strategies over seeded option shufflings");
  add_config_flags(perm, perm_flags, false);
  std::size_t perm_count = 5;
  std::uint64_t perm_seed = 0;
  perm->add_option("--count", perm_count, "Number of permutations")
      ->check(CLI::PositiveNumber);
  perm->add_option("--permutation-seed", perm_seed, "Permutation seed");
  perm->add_option("--out", out_dir, "Directory for reports");

  CLI::App* lb = app.add_subcommand(
      "leaderboard", "Rank models under each strategy");
  std::string lb_input;
  lb->add_option("input", lb_input, "Leaderboard input (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  lb->add_option("--out", out_dir, "Directory for reports");

  CLI::App* render = app.add_subcommand("render", "Print rendered prompts");
  add_config_flags(render, render_flags, true);
  bool golden = false;
  std::vector<std::string> render_ids;
  render->add_flag("--golden", golden,
                   "Render the placeholder prompts for every built-in template");
  render->add_option("--id", render_ids, "Only these example ids");
  render->add_option("--out", out_dir, "Directory for --golden files");

  CLI::App* check = app.add_subcommand(
      "selfcheck", "Check the statistics against independent oracles");

  CLI::App* serve = app.add_subcommand(
      "serve-mock", "Serve a mock score table over the wire protocol");
  std::string serve_spec;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  serve->add_option("--mock-spec", serve_spec, "Mock score table (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run, run_flags, out_dir);
    if (cmp->parsed()) return cmd_compare(cmp, cmp_flags, out_dir);
    if (perm->parsed()) {
      return cmd_permute(perm, perm_flags, perm_count, perm_seed, out_dir);
    }
    if (lb->parsed()) return cmd_leaderboard(lb_input, out_dir);
    if (render->parsed()) {
      return golden ? cmd_render_golden(out_dir)
                    : cmd_render(render, render_flags, render_ids);
    }
    if (check->parsed()) return run_selfcheck(std::cout) ? 0 : 1;
    if (serve->parsed()) return cmd_serve_mock(serve_spec, serve_host, serve_port);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(to_string(e.code())).c_str(),
                 e.what());
    if (e.position()) std::fprintf(stderr, "  at position %zu\n", *e.position());
    if (!e.example_ids().empty()) {
      std::fprintf(stderr, "  examples:");
      for (const auto& id : e.example_ids()) std::fprintf(stderr, " %s", id.c_str());
      std::fprintf(stderr, "\n");
    }
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace mcqa::cli

int main(int argc, char** argv) { return mcqa::cli::main_impl(argc, argv); }
