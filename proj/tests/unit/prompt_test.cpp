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

#include "mcqa/prompt.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "golden.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

namespace mcqa {
namespace {

using ::mcqa::testing::data_path;
using ::mcqa::testing::golden_cases;
using ::mcqa::testing::placeholder_exemplars;
using ::mcqa::testing::placeholder_question;
using ::mcqa::testing::read_file;
using ::mcqa::testing::templates_path;
using ::testing::ElementsAre;

constexpr auto kLetter = TokenizationStrategy::kLetterOnly;
constexpr auto kSpace = TokenizationStrategy::kSpaceLetter;

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

TEST(RenderPrompt, MatchesGoldenFiles) {
  for (const auto& c : golden_cases()) {
    for (auto [s, suffix] : {std::pair{kLetter, "letter"}, {kSpace, "space"}}) {
      const std::string file =
          std::string("golden/") + c.name + "_" + suffix + ".txt";
      const std::string expected = read_file(data_path(file));
      ASSERT_FALSE(expected.empty()) << file;
      EXPECT_EQ(render_prompt(placeholder_question(), c.tmpl, s).text, expected)
          << file;
    }
  }
}

TEST(RenderPrompt, FiveShotGolden) {
  const auto exemplars = placeholder_exemplars();
  for (auto [s, suffix] : {std::pair{kLetter, "letter"}, {kSpace, "space"}}) {
    const std::string expected = read_file(
        data_path(std::string("golden/base_five_shot_") + suffix + ".txt"));
    const RenderedPrompt r =
        render_prompt(placeholder_question(), base_template(), s, exemplars);
    EXPECT_EQ(r.text, expected);
    EXPECT_EQ(r.exemplar_count, 5u);
    // Five completed answers plus the open cue.
    EXPECT_EQ(count(r.text, "\nAnswer: "), 5u + (s == kLetter ? 1u : 0u));
    EXPECT_EQ(count(r.text, "Answer:"), 6u);
  }
}

TEST(RenderPrompt, StrategiesDifferOnlyInTrailingSpace) {
  const auto exemplars = placeholder_exemplars();
  for (const auto& c : golden_cases()) {
    for (std::size_t shots : {0u, 5u}) {
      std::span<const Question> ex(exemplars.data(), shots);
      const auto a = render_prompt(placeholder_question(), c.tmpl, kLetter, ex);
      const auto b = render_prompt(placeholder_question(), c.tmpl, kSpace, ex);
      EXPECT_EQ(a.text, b.text + " ") << c.name;
      EXPECT_TRUE(a.text.ends_with(c.tmpl.answer_cue + " "));
      EXPECT_TRUE(b.text.ends_with(c.tmpl.answer_cue));
    }
  }
}

TEST(RenderPrompt, SegmentsForceExemplarAnswerBoundaries) {
  const auto exemplars = placeholder_exemplars();
  std::span<const Question> one(exemplars.data(), 1);
  const auto a = render_prompt(placeholder_question(), base_template(), kLetter, one);
  const auto b = render_prompt(placeholder_question(), base_template(), kSpace, one);
  std::string joined;
  for (const auto& s : a.segments) joined += s;
  EXPECT_EQ(joined, a.text);
  joined.clear();
  for (const auto& s : b.segments) joined += s;
  EXPECT_EQ(joined, b.text);
  EXPECT_NE(std::find(a.segments.begin(), a.segments.end(), "A"),
            a.segments.end());
  EXPECT_NE(std::find(b.segments.begin(), b.segments.end(), " A"),
            b.segments.end());
  EXPECT_EQ(a.segments.back(), " ");
}

TEST(RenderPrompt, CandidateSurfaces) {
  const Question q = placeholder_question();
  EXPECT_THAT(render_prompt(q, base_template(), kLetter).candidate_surfaces,
              ElementsAre("A", "B", "C", "D"));
  EXPECT_THAT(render_prompt(q, base_template(), kSpace).candidate_surfaces,
              ElementsAre(" A", " B", " C", " D"));
  const auto paren = apply_variation(base_template(), Variation::kParentheses);
  EXPECT_THAT(render_prompt(q, paren, kLetter).candidate_surfaces,
              ElementsAre("(A)", "(B)", "(C)", "(D)"));
  EXPECT_THAT(render_prompt(q, paren, kSpace).candidate_surfaces,
              ElementsAre(" (A)", " (B)", " (C)", " (D)"));
  const auto numbers = apply_variation(base_template(), Variation::kNumbers);
  EXPECT_THAT(render_prompt(q, numbers, kSpace).candidate_surfaces,
              ElementsAre(" 1", " 2", " 3", " 4"));
}

TEST(RenderPrompt, Errors) {
  Question q = placeholder_question();
  const auto exemplars = placeholder_exemplars();
  std::vector<Question> overlapping = {exemplars[0]};
  overlapping[0].id = q.id;
  EXPECT_MCQA_ERROR(render_prompt(q, base_template(), kLetter, overlapping),
                    ErrorCode::kExemplarOverlap);

  Question many = q;
  many.options.clear();
  for (int i = 0; i < 10; ++i) many.options.push_back("o" + std::to_string(i));
  const auto numbers = apply_variation(base_template(), Variation::kNumbers);
  EXPECT_MCQA_ERROR(render_prompt(many, numbers, kLetter),
                    ErrorCode::kTooManyOptions);
}

TEST(RenderPrompt, Deterministic) {
  const auto exemplars = placeholder_exemplars();
  const auto a = render_prompt(placeholder_question(), instruct_template(),
                               kSpace, exemplars);
  const auto b = render_prompt(placeholder_question(), instruct_template(),
                               kSpace, exemplars);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.segments, b.segments);
}

TEST(ApplyVariation, ChangesOnlyItsField) {
  const PromptTemplate base = base_template();
  PromptTemplate v = apply_variation(base, Variation::kParentheses);
  EXPECT_EQ(v.label_style, LabelStyle::kParenthesizedLetter);
  v.label_style = base.label_style;
  EXPECT_EQ(v, base);

  v = apply_variation(base, Variation::kSpaceInOptionList);
  EXPECT_EQ(v.option_line_prefix, " ");
  v.option_line_prefix = base.option_line_prefix;
  EXPECT_EQ(v, base);

  v = apply_variation(base, Variation::kChoicesBeforeQuestion);
  EXPECT_EQ(v.choices_position, ChoicesPosition::kBeforeQuestion);
  v.choices_position = base.choices_position;
  EXPECT_EQ(v, base);
}

TEST(ApplyVariation, Incompatible) {
  EXPECT_MCQA_ERROR(apply_variation(base_template(), Variation::kNumbers, 10),
                    ErrorCode::kIncompatibleVariation);
  const auto paren = apply_variation(base_template(), Variation::kParentheses);
  EXPECT_MCQA_ERROR(apply_variation(paren, Variation::kNumbers),
                    ErrorCode::kIncompatibleVariation);
  EXPECT_NO_THROW(apply_variation(base_template(), Variation::kNumbers, 9));
}

// The option bodies appear in the rendering exactly once each, whatever the
// variation.
TEST(ApplyVariation, OptionTextsInvariant) {
  const Question q{"q", "Stem?", {"alpha", "beta", "gamma", "delta"}, 1,
                   std::nullopt, std::nullopt};
  for (Variation v : {Variation::kParentheses, Variation::kNumbers,
                      Variation::kSpaceInOptionList,
                      Variation::kChoicesBeforeQuestion}) {
    const auto text =
        render_prompt(q, apply_variation(base_template(), v), kLetter).text;
    for (const auto& o : q.options) EXPECT_EQ(count(text, " " + o + "\n"), 1u);
  }
}

TEST(PermuteOptions, IdentityAndRemap) {
  const Question q{"q", "s", {"o0", "o1", "o2", "o3"}, 2, std::nullopt,
                   std::nullopt};
  const std::vector<std::size_t> identity = {0, 1, 2, 3};
  const Question same = permute_options(q, identity);
  EXPECT_EQ(same.options, q.options);
  EXPECT_EQ(same.gold_index, 2u);

  const std::vector<std::size_t> perm = {0, 2, 1, 3};
  const Question p = permute_options(q, perm);
  EXPECT_THAT(p.options, ElementsAre("o0", "o2", "o1", "o3"));
  EXPECT_EQ(p.gold_index, 1u);
  EXPECT_EQ(p.options[p.gold_index], q.options[q.gold_index]);
}

TEST(PermuteOptions, Errors) {
  const Question q{"q", "s", {"o0", "o1", "o2", "o3"}, 2, std::nullopt,
                   std::nullopt};
  const std::vector<std::size_t> short_perm = {0, 1, 2};
  EXPECT_MCQA_ERROR(permute_options(q, short_perm),
                    ErrorCode::kInvalidPermutation);
  const std::vector<std::size_t> repeated = {0, 1, 1, 3};
  EXPECT_MCQA_ERROR(permute_options(q, repeated), ErrorCode::kInvalidPermutation);
}

TEST(PermuteOptions, GoldTextPreservedInRendering) {
  const Question q{"q", "s", {"w", "x", "y", "z"}, 3, std::nullopt,
                   std::nullopt};
  for (const auto& perm : generate_permutations(4, 23, 1)) {
    const Question p = permute_options(q, perm);
    const auto labels = option_labels(LabelStyle::kLetter, 4);
    const std::string text = render_prompt(p, base_template(), kLetter).text;
    EXPECT_NE(text.find(labels[p.gold_index] + ". z\n"), std::string::npos);
  }
}

TEST(GeneratePermutations, DeterministicDistinctNonIdentity) {
  const auto a = generate_permutations(4, 5, 7);
  const auto b = generate_permutations(4, 5, 7);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 5u);
  const std::set<Permutation> distinct(a.begin(), a.end());
  EXPECT_EQ(distinct.size(), 5u);
  for (const auto& p : a) {
    EXPECT_NE(p, (Permutation{0, 1, 2, 3}));
    EXPECT_TRUE(std::is_permutation(p.begin(), p.end(),
                                    Permutation{0, 1, 2, 3}.begin()));
  }
  // All 23 non-identity permutations of four options are reachable.
  EXPECT_EQ(generate_permutations(4, 23, 3).size(), 23u);
}

TEST(GeneratePermutations, CountExceedsAvailable) {
  EXPECT_MCQA_ERROR(generate_permutations(2, 2, 9),
                    ErrorCode::kPermutationCountExceeded);
  EXPECT_EQ(generate_permutations(2, 1, 9),
            (std::vector<Permutation>{{1, 0}}));
  EXPECT_MCQA_ERROR(generate_permutations(4, 24, 0),
                    ErrorCode::kPermutationCountExceeded);
  EXPECT_MCQA_ERROR(generate_permutations(4, 0, 0), ErrorCode::kInvalidArgument);
}

TEST(CotPrompt, InstructionAndCompletion) {
  const Question q = placeholder_question();
  const std::string cot = render_cot_prompt(q, base_template());
  EXPECT_TRUE(cot.ends_with(
      "D. {option D}\nThink step by step, then finish with 'Answer: X'.\n"));
  const auto a = complete_cot_prompt(q, base_template(), kLetter, cot,
                                     "Because reasons.  \n", 0);
  EXPECT_EQ(a.text, cot + "Because reasons.\nAnswer: ");
  const auto b = complete_cot_prompt(q, base_template(), kSpace, cot, "", 0);
  EXPECT_EQ(b.text, cot + "Answer:");

  const std::string icot = render_cot_prompt(q, instruct_template());
  EXPECT_TRUE(icot.ends_with("'Answer: X'.\n{assistant token}\n"));
}

TEST(TemplateFingerprint, SensitiveToEveryField) {
  const PromptTemplate t = base_template();
  EXPECT_EQ(template_fingerprint(t), template_fingerprint(base_template()));
  EXPECT_EQ(template_fingerprint(t).size(), 64u);
  PromptTemplate u = t;
  u.answer_cue = "Answer :";
  EXPECT_NE(template_fingerprint(t), template_fingerprint(u));
  EXPECT_NE(template_fingerprint(t), template_fingerprint(instruct_template()));
}

TEST(LanguagePacks, AllShippedPacksLoad) {
  for (const char* lang : {"en", "es", "de", "fr", "zh", "hi"}) {
    const auto pack =
        load_language_pack(templates_path(std::string(lang) + ".json"));
    ASSERT_TRUE(pack.contains("base")) << lang;
    ASSERT_TRUE(pack.contains("instruct")) << lang;
    EXPECT_EQ(pack.at("base").language, lang);
    EXPECT_FALSE(pack.at("base").answer_cue.empty());
    ASSERT_TRUE(pack.at("instruct").roles.has_value());
    const auto r = render_prompt(placeholder_question(), pack.at("base"), kSpace);
    EXPECT_TRUE(r.text.ends_with(pack.at("base").answer_cue));
  }
}

TEST(LanguagePacks, EnglishPackMatchesBuiltIns) {
  const auto pack = load_language_pack(templates_path("en.json"));
  EXPECT_EQ(pack.at("base"), base_template());
  EXPECT_EQ(pack.at("instruct"), instruct_template());
}

TEST(LoadTemplate, RoundTripsThroughJson) {
  const auto dir = ::mcqa::testing::scratch_dir("template");
  PromptTemplate t = apply_variation(instruct_template(), Variation::kNumbers);
  t.template_id = "custom";
  const auto path = dir / "t.json";
  {
    std::ofstream out(path);
    out << template_to_json(t);
  }
  EXPECT_EQ(load_template(path), t);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mcqa
