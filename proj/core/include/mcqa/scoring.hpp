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

#ifndef MCQA_SCORING_HPP_
#define MCQA_SCORING_HPP_

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcqa {

struct ScoreRequest {
  std::string prompt;
  // Candidate continuations as text (e.g. "A" or " A").
  std::vector<std::string> candidates;
  // Optional forced token boundaries over `prompt`; empty means "tokenize
  // the prompt as a whole".
  std::vector<std::string> prompt_segments;
};

struct ScoreResponse {
  std::vector<double> logits;  // aligned with ScoreRequest::candidates
};

struct GenerateRequest {
  std::string prompt;
  int max_tokens = 256;
  std::vector<std::string> stop;
};

// Cuts `text` before the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string_view text,
                             const std::vector<std::string>& stop);

// The single boundary to language models. Public entry points validate
// preconditions and response invariants; subclasses implement the raw calls.
// Implementations must be safe for concurrent calls.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;

  // One finite logit per candidate, index-aligned.
  ScoreResponse score_candidates(const ScoreRequest& req);

  // Greedy continuation of `prompt`, cut at the first stop sequence.
  std::string generate_greedy(std::string_view prompt, int max_tokens,
                              const std::vector<std::string>& stop);

  // Short human-readable description for run reports.
  virtual std::string describe() const = 0;

 protected:
  virtual ScoreResponse do_score(const ScoreRequest& req) = 0;
  virtual std::string do_generate(const GenerateRequest& req) = 0;
};

// Deterministic table-driven backend.
//
// Score lookups try (prompt fingerprint, candidate), then ("*", candidate),
// then fall back to `default_logit`. Generations are keyed by prompt
// fingerprint (or "*") and default to the empty string.
struct MockBackendSpec {
  static constexpr std::string_view kAnyPrompt = "*";

  std::map<std::pair<std::string, std::string>, double> scores;
  std::map<std::string, std::string> generations;
  double default_logit = 0.0;

  void set_score(std::string_view prompt, std::string candidate, double logit);
  void set_generation(std::string_view prompt, std::string text);
};

// JSON document:
//   {"default_logit": -1.0,
//    "scores": [{"prompt": "..."|"fingerprint": "<hex>"|"*",
//                "candidate": "A", "logit": 2.0}, ...],
//    "generations": [{"prompt"|"fingerprint": ..., "text": "..."}, ...]}
MockBackendSpec load_mock_spec(const std::filesystem::path& path);
MockBackendSpec parse_mock_spec(std::string_view json_text);
std::string mock_spec_to_json(const MockBackendSpec& spec);

class MockBackend : public ScoringBackend {
 public:
  explicit MockBackend(MockBackendSpec spec);

  std::string describe() const override { return "mock"; }

  // Number of score + generate calls served so far.
  std::size_t call_count() const noexcept { return calls_.load(); }
  const MockBackendSpec& spec() const noexcept { return spec_; }

 protected:
  ScoreResponse do_score(const ScoreRequest& req) override;
  std::string do_generate(const GenerateRequest& req) override;

 private:
  MockBackendSpec spec_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace mcqa

#endif  // MCQA_SCORING_HPP_
