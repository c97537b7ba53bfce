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

// Scripted runs over the 20-question fixture.
//
// Gold letters of fixture20 (q01..q20):
//   A B C D B A D C B B A C D B A C B D A B   (7 x B)
//
// Three-flip table:
//   letter-only   always predicts B                      -> 7/20 correct
//   space-letter  predicts B, except q01 -> A, q03 -> C,
//                 q04 -> D (their golds)                 -> 10/20 correct
// so b = 3, c = 0 and the accuracy delta is 3/20.

#ifndef MCQA_TESTS_FIXTURES_HPP_
#define MCQA_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "mcqa/harness.hpp"
#include "test_support.hpp"

namespace mcqa::testing {

inline const std::vector<std::string>& flip_ids() {
  static const std::vector<std::string> ids = {"q01", "q03", "q04"};
  return ids;
}

inline RunConfig fixture_config() {
  RunConfig cfg;
  cfg.dataset_path = data_path("datasets/fixture20.jsonl");
  cfg.vocab_path = data_path("vocab/marker.vocab");
  cfg.model_id = "mock";
  cfg.bootstrap_seed = 7;
  return cfg;
}

inline MockBackendSpec three_flip_spec(const EvalInputs& inputs) {
  MockBackendSpec spec;
  spec.set_score(MockBackendSpec::kAnyPrompt, "B", 2.0);
  spec.set_score(MockBackendSpec::kAnyPrompt, " B", 2.0);
  for (const auto& q : inputs.questions) {
    for (const auto& id : flip_ids()) {
      if (q.id != id) continue;
      const RenderedPrompt r = render_prompt(q, inputs.prompt_template,
                                             TokenizationStrategy::kSpaceLetter);
      spec.set_score(r.text, r.candidate_surfaces[q.gold_index], 3.0);
    }
  }
  return spec;
}

}  // namespace mcqa::testing

#endif  // MCQA_TESTS_FIXTURES_HPP_
