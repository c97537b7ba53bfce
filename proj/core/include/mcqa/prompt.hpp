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

#ifndef MCQA_PROMPT_HPP_
#define MCQA_PROMPT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa/tokenizer.hpp"

namespace mcqa {

struct Question {
  std::string id;
  std::string stem;
  std::vector<std::string> options;
  std::size_t gold_index = 0;
  std::optional<std::string> subject;
  std::optional<std::string> language;

  bool operator==(const Question&) const = default;
};

// Throws Error{kInvalidArgument} when the question violates its invariants.
void validate(const Question& q);

enum class LabelStyle { kLetter, kParenthesizedLetter, kNumber };
enum class ChoicesPosition { kAfterQuestion, kBeforeQuestion };

// Model-specific chat markers. They are opaque and emitted verbatim, each on
// its own line.
struct RoleWrappers {
  std::string system_marker = "{system token}";
  std::string system_text;
  std::string user_marker = "{user token}";
  std::string assistant_marker = "{assistant token}";

  bool operator==(const RoleWrappers&) const = default;
};

struct PromptTemplate {
  std::string template_id = "base";
  std::string preamble;
  LabelStyle label_style = LabelStyle::kLetter;
  std::string option_line_prefix;  // "" or " "
  ChoicesPosition choices_position = ChoicesPosition::kAfterQuestion;
  std::optional<RoleWrappers> roles;  // set for instruction-tuned models
  std::string question_prefix = "Question:";
  std::string answer_cue = "Answer:";
  std::string cot_instruction =
      "Think step by step, then finish with 'Answer: X'.";
  std::string language = "en";

  bool operator==(const PromptTemplate&) const = default;
};

// Built-in English templates for base and instruction-tuned models.
PromptTemplate base_template();
PromptTemplate instruct_template(RoleWrappers roles = {});

// Content hash over every field; part of cache keys.
std::string template_fingerprint(const PromptTemplate& t);

// Label surfaces as scored ("A", "(A)", "1") for the first `n` options.
std::vector<std::string> option_labels(LabelStyle style, std::size_t n);
std::size_t max_options(LabelStyle style);

struct RenderedPrompt {
  std::string text;
  // Pieces whose boundaries are forced token boundaries; concatenation equals
  // `text`. Backends that tokenize piecewise reproduce the strategy's
  // tokenization of exemplar answers.
  std::vector<std::string> segments;
  // Scoring surface per option, in plain text: "X" or " X".
  std::vector<std::string> candidate_surfaces;
  std::vector<std::string> labels;
  TokenizationStrategy strategy = TokenizationStrategy::kLetterOnly;
  std::size_t exemplar_count = 0;
};

// Renders `q` with answered exemplars in front. Exemplar answers use the
// same label surface form the strategy scores.
RenderedPrompt render_prompt(const Question& q, const PromptTemplate& t,
                             TokenizationStrategy s,
                             std::span<const Question> exemplars = {});

// Chain-of-thought: the prompt given to greedy generation, ending right where
// the model is expected to start reasoning.
std::string render_cot_prompt(const Question& q, const PromptTemplate& t,
                              std::span<const Question> exemplars = {});

// Appends the model's reasoning and the answer cue to a CoT prompt, yielding
// the prompt that is scored.
RenderedPrompt complete_cot_prompt(const Question& q, const PromptTemplate& t,
                                   TokenizationStrategy s,
                                   std::string_view cot_prompt,
                                   std::string_view reasoning,
                                   std::size_t exemplar_count);

enum class Variation {
  kParentheses,
  kNumbers,
  kSpaceInOptionList,
  kChoicesBeforeQuestion,
};

std::string_view to_string(Variation v);
Variation parse_variation(std::string_view text);

// Returns a copy of `t` differing only in the field `v` controls.
// `n_options` is checked against the label capacity of the new style.
PromptTemplate apply_variation(const PromptTemplate& t, Variation v,
                               std::size_t n_options = 4);

// perm[new_position] = old_index. The gold option text is preserved.
Question permute_options(const Question& q, std::span<const std::size_t> perm);

using Permutation = std::vector<std::size_t>;

// `count` distinct non-identity permutations of 0..n_options-1, seeded.
std::vector<Permutation> generate_permutations(std::size_t n_options,
                                               std::size_t count,
                                               std::uint64_t seed);

// Template documents (JSON). A language pack maps template ids ("base",
// "instruct") to template objects.
PromptTemplate load_template(const std::filesystem::path& path);
std::map<std::string, PromptTemplate> load_language_pack(
    const std::filesystem::path& path);
std::string template_to_json(const PromptTemplate& t);

}  // namespace mcqa

#endif  // MCQA_PROMPT_HPP_
