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
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"
#include "mcqa/error.hpp"
#include "mcqa/fingerprint.hpp"
#include "mcqa/rng.hpp"
#include "text_util.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

constexpr std::string_view kBasePreamble =
    "The following are multiple choice questions (with answers).";
constexpr std::string_view kInstructSystemText =
    "You are a helpful assistant for multiple-choice questions. Always answer "
    "strictly in the format \"Answer: X\", where X is the letter of the "
    "chosen answer (A, B, C, or D). Do not include any other text or "
    "explanation.";

std::string line_label(LabelStyle style, std::size_t i) {
  switch (style) {
    case LabelStyle::kLetter:
      return std::string(1, static_cast<char>('A' + i)) + ".";
    case LabelStyle::kParenthesizedLetter:
      return "(" + std::string(1, static_cast<char>('A' + i)) + ")";
    case LabelStyle::kNumber:
      return std::to_string(i + 1) + ".";
  }
  return {};
}

void check_label_capacity(const PromptTemplate& t, const Question& q) {
  if (q.options.size() > max_options(t.label_style)) {
    throw Error(ErrorCode::kTooManyOptions,
                "question '" + q.id + "' has " +
                    std::to_string(q.options.size()) +
                    " options; label style supports at most " +
                    std::to_string(max_options(t.label_style)));
  }
}

// Question line plus option lines, without the answer cue.
std::string question_block(const Question& q, const PromptTemplate& t) {
  std::string options;
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    if (i > 0) options += '\n';
    options += t.option_line_prefix + line_label(t.label_style, i) + " " +
               q.options[i];
  }
  const std::string question = t.question_prefix + " " + q.stem;
  if (t.choices_position == ChoicesPosition::kBeforeQuestion) {
    return options + "\n" + question;
  }
  return question + "\n" + options;
}

// Accumulates text while remembering forced token boundaries.
class SegmentWriter {
 public:
  void append(std::string_view s) { current_ += s; }
  void cut() {
    if (!current_.empty()) segments_.push_back(std::move(current_));
    current_.clear();
  }
  void piece(std::string_view s) {
    cut();
    if (!s.empty()) segments_.emplace_back(s);
  }
  std::vector<std::string> finish() {
    cut();
    return std::move(segments_);
  }

 private:
  std::string current_;
  std::vector<std::string> segments_;
};

void append_answer(SegmentWriter& w, const PromptTemplate& t,
                   TokenizationStrategy s, const std::string& label) {
  w.append(t.answer_cue);
  if (s == TokenizationStrategy::kLetterOnly) {
    w.piece(" ");
    w.piece(label);
  } else {
    w.piece(" " + label);
  }
}

void check_exemplars(const Question& q, const PromptTemplate& t,
                     std::span<const Question> exemplars) {
  check_label_capacity(t, q);
  for (const Question& ex : exemplars) {
    if (ex.id == q.id) {
      throw Error(ErrorCode::kExemplarOverlap,
                  "exemplar '" + ex.id + "' is the evaluated question");
    }
    check_label_capacity(t, ex);
    validate(ex);
  }
  validate(q);
}

// Everything before the final cue. For instruct templates this ends inside
// the user turn (no assistant marker yet).
void write_body(SegmentWriter& w, const Question& q, const PromptTemplate& t,
                TokenizationStrategy s, std::span<const Question> exemplars) {
  if (t.roles) {
    w.append(t.roles->system_marker + "\n" + t.roles->system_text + "\n" +
             t.roles->user_marker + "\n");
  }
  if (!t.preamble.empty()) w.append(t.preamble + "\n");
  for (const Question& ex : exemplars) {
    const auto labels = option_labels(t.label_style, ex.options.size());
    w.append(question_block(ex, t) + "\n");
    append_answer(w, t, s, labels[ex.gold_index]);
    w.append("\n\n");
  }
  w.append(question_block(q, t));
}

std::vector<std::string> candidates_for(const std::vector<std::string>& labels,
                                        TokenizationStrategy s) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    out.push_back(s == TokenizationStrategy::kSpaceLetter ? " " + label
                                                          : label);
  }
  return out;
}

void append_final_cue(SegmentWriter& w, const PromptTemplate& t,
                      TokenizationStrategy s) {
  w.append(t.answer_cue);
  if (s == TokenizationStrategy::kLetterOnly) w.piece(" ");
}

std::string_view to_string(LabelStyle s) {
  switch (s) {
    case LabelStyle::kLetter: return "letter";
    case LabelStyle::kParenthesizedLetter: return "parenthesized_letter";
    case LabelStyle::kNumber: return "number";
  }
  return "?";
}

LabelStyle parse_label_style(const std::string& s) {
  if (s == "letter") return LabelStyle::kLetter;
  if (s == "parenthesized_letter") return LabelStyle::kParenthesizedLetter;
  if (s == "number") return LabelStyle::kNumber;
  throw Error(ErrorCode::kTemplate, "unknown label_style '" + s + "'");
}

std::string_view to_string(ChoicesPosition p) {
  return p == ChoicesPosition::kBeforeQuestion ? "before_question"
                                               : "after_question";
}

ChoicesPosition parse_choices_position(const std::string& s) {
  if (s == "after_question") return ChoicesPosition::kAfterQuestion;
  if (s == "before_question") return ChoicesPosition::kBeforeQuestion;
  throw Error(ErrorCode::kTemplate, "unknown choices_position '" + s + "'");
}

json to_json(const PromptTemplate& t) {
  json j = {
      {"template_id", t.template_id},
      {"preamble", t.preamble},
      {"label_style", std::string(to_string(t.label_style))},
      {"option_line_prefix", t.option_line_prefix},
      {"choices_position", std::string(to_string(t.choices_position))},
      {"question_prefix", t.question_prefix},
      {"answer_cue", t.answer_cue},
      {"cot_instruction", t.cot_instruction},
      {"language", t.language},
  };
  if (t.roles) {
    j["roles"] = {{"system_marker", t.roles->system_marker},
                  {"system_text", t.roles->system_text},
                  {"user_marker", t.roles->user_marker},
                  {"assistant_marker", t.roles->assistant_marker}};
  }
  return j;
}

PromptTemplate from_json(const json& j, const std::string& origin) {
  try {
    PromptTemplate t;
    t.template_id = j.at("template_id").get<std::string>();
    t.preamble = j.value("preamble", std::string());
    t.label_style = parse_label_style(j.value("label_style", "letter"));
    t.option_line_prefix = j.value("option_line_prefix", std::string());
    t.choices_position =
        parse_choices_position(j.value("choices_position", "after_question"));
    t.question_prefix = j.value("question_prefix", t.question_prefix);
    t.answer_cue = j.value("answer_cue", t.answer_cue);
    t.cot_instruction = j.value("cot_instruction", t.cot_instruction);
    t.language = j.value("language", t.language);
    if (j.contains("roles")) {
      const json& r = j.at("roles");
      RoleWrappers roles;
      roles.system_marker = r.value("system_marker", roles.system_marker);
      roles.system_text = r.value("system_text", roles.system_text);
      roles.user_marker = r.value("user_marker", roles.user_marker);
      roles.assistant_marker =
          r.value("assistant_marker", roles.assistant_marker);
      t.roles = std::move(roles);
    }
    if (t.answer_cue.empty()) {
      throw Error(ErrorCode::kTemplate, "answer_cue must be non-empty");
    }
    if (!t.option_line_prefix.empty() && t.option_line_prefix != " ") {
      throw Error(ErrorCode::kTemplate,
                  "option_line_prefix must be empty or a single space");
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kTemplate, origin + ": " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot open template file: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kTemplate, path.string() + ": " + e.what());
  }
}

}  // namespace

void validate(const Question& q) {
  if (q.options.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "question '" + q.id + "' needs at least two options");
  }
  if (q.gold_index >= q.options.size()) {
    throw Error(ErrorCode::kGoldOutOfRange,
                "question '" + q.id + "' gold index " +
                    std::to_string(q.gold_index) + " out of range");
  }
  for (const auto& o : q.options) {
    if (o.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "question '" + q.id + "' has an empty option");
    }
  }
}

PromptTemplate base_template() {
  PromptTemplate t;
  t.template_id = "base";
  t.preamble = std::string(kBasePreamble);
  return t;
}

PromptTemplate instruct_template(RoleWrappers roles) {
  PromptTemplate t;
  t.template_id = "instruct";
  if (roles.system_text.empty()) {
    roles.system_text = std::string(kInstructSystemText);
  }
  t.roles = std::move(roles);
  return t;
}

std::string template_fingerprint(const PromptTemplate& t) {
  return sha256_hex(to_json(t).dump());
}

std::string template_to_json(const PromptTemplate& t) {
  return to_json(t).dump(2);
}

std::size_t max_options(LabelStyle style) {
  return style == LabelStyle::kNumber ? 9 : 26;
}

std::vector<std::string> option_labels(LabelStyle style, std::size_t n) {
  if (n > max_options(style)) {
    throw Error(ErrorCode::kTooManyOptions,
                std::to_string(n) + " options exceed the label style capacity");
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string letter(1, static_cast<char>('A' + i));
    switch (style) {
      case LabelStyle::kLetter: out.push_back(letter); break;
      case LabelStyle::kParenthesizedLetter:
        out.push_back("(" + letter + ")");
        break;
      case LabelStyle::kNumber: out.push_back(std::to_string(i + 1)); break;
    }
  }
  return out;
}

RenderedPrompt render_prompt(const Question& q, const PromptTemplate& t,
                             TokenizationStrategy s,
                             std::span<const Question> exemplars) {
  check_exemplars(q, t, exemplars);
  SegmentWriter w;
  write_body(w, q, t, s, exemplars);
  w.append("\n");
  if (t.roles) w.append(t.roles->assistant_marker + "\n");
  append_final_cue(w, t, s);

  RenderedPrompt out;
  out.segments = w.finish();
  for (const auto& seg : out.segments) out.text += seg;
  out.labels = option_labels(t.label_style, q.options.size());
  out.candidate_surfaces = candidates_for(out.labels, s);
  out.strategy = s;
  out.exemplar_count = exemplars.size();
  return out;
}

std::string render_cot_prompt(const Question& q, const PromptTemplate& t,
                              std::span<const Question> exemplars) {
  check_exemplars(q, t, exemplars);
  // Exemplar answers inside a CoT prompt are plain text; the generation
  // request carries no candidates, so the strategy only matters for segments.
  SegmentWriter w;
  write_body(w, q, t, TokenizationStrategy::kSpaceLetter, exemplars);
  w.append("\n" + t.cot_instruction + "\n");
  if (t.roles) w.append(t.roles->assistant_marker + "\n");
  std::string text;
  for (const auto& seg : w.finish()) text += seg;
  return text;
}

RenderedPrompt complete_cot_prompt(const Question& q, const PromptTemplate& t,
                                   TokenizationStrategy s,
                                   std::string_view cot_prompt,
                                   std::string_view reasoning,
                                   std::size_t exemplar_count) {
  SegmentWriter w;
  w.append(cot_prompt);
  const std::string trimmed = detail::rtrim(reasoning);
  if (!trimmed.empty()) w.append(trimmed + "\n");
  append_final_cue(w, t, s);

  RenderedPrompt out;
  out.segments = w.finish();
  for (const auto& seg : out.segments) out.text += seg;
  out.labels = option_labels(t.label_style, q.options.size());
  out.candidate_surfaces = candidates_for(out.labels, s);
  out.strategy = s;
  out.exemplar_count = exemplar_count;
  return out;
}

std::string_view to_string(Variation v) {
  switch (v) {
    case Variation::kParentheses: return "parentheses";
    case Variation::kNumbers: return "numbers";
    case Variation::kSpaceInOptionList: return "space-in-option-list";
    case Variation::kChoicesBeforeQuestion: return "choices-before-question";
  }
  return "?";
}

Variation parse_variation(std::string_view text) {
  for (Variation v : {Variation::kParentheses, Variation::kNumbers,
                      Variation::kSpaceInOptionList,
                      Variation::kChoicesBeforeQuestion}) {
    if (text == to_string(v)) return v;
  }
  throw Error(ErrorCode::kIncompatibleVariation,
              "unknown prompt variation '" + std::string(text) + "'");
}

PromptTemplate apply_variation(const PromptTemplate& t, Variation v,
                               std::size_t n_options) {
  PromptTemplate out = t;
  switch (v) {
    case Variation::kParentheses:
      if (t.label_style == LabelStyle::kNumber) {
        throw Error(ErrorCode::kIncompatibleVariation,
                    "parentheses variation needs letter labels");
      }
      out.label_style = LabelStyle::kParenthesizedLetter;
      break;
    case Variation::kNumbers:
      if (t.label_style == LabelStyle::kParenthesizedLetter) {
        throw Error(ErrorCode::kIncompatibleVariation,
                    "numbers variation cannot combine with parentheses");
      }
      out.label_style = LabelStyle::kNumber;
      break;
    case Variation::kSpaceInOptionList:
      out.option_line_prefix = " ";
      break;
    case Variation::kChoicesBeforeQuestion:
      out.choices_position = ChoicesPosition::kBeforeQuestion;
      break;
  }
  if (n_options > max_options(out.label_style)) {
    throw Error(ErrorCode::kIncompatibleVariation,
                std::string(to_string(v)) + " variation supports at most " +
                    std::to_string(max_options(out.label_style)) +
                    " options, got " + std::to_string(n_options));
  }
  return out;
}

Question permute_options(const Question& q,
                         std::span<const std::size_t> perm) {
  if (perm.size() != q.options.size()) {
    throw Error(ErrorCode::kInvalidPermutation,
                "permutation of length " + std::to_string(perm.size()) +
                    " applied to " + std::to_string(q.options.size()) +
                    " options");
  }
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t old_index : perm) {
    if (old_index >= perm.size() || seen[old_index]) {
      throw Error(ErrorCode::kInvalidPermutation, "permutation is not bijective");
    }
    seen[old_index] = true;
  }
  Question out = q;
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    out.options[pos] = q.options[perm[pos]];
    if (perm[pos] == q.gold_index) out.gold_index = pos;
  }
  return out;
}

std::vector<Permutation> generate_permutations(std::size_t n_options,
                                               std::size_t count,
                                               std::uint64_t seed) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "permutation count must be >= 1");
  }
  // n! - 1 non-identity permutations, saturating.
  std::uint64_t available = 1;
  for (std::size_t k = 2; k <= n_options; ++k) {
    if (available > std::numeric_limits<std::uint64_t>::max() / k) {
      available = std::numeric_limits<std::uint64_t>::max();
      break;
    }
    available *= k;
  }
  available -= 1;
  if (count > available) {
    throw Error(ErrorCode::kPermutationCountExceeded,
                "requested " + std::to_string(count) +
                    " distinct non-identity permutations of " +
                    std::to_string(n_options) + " options; only " +
                    std::to_string(available) + " exist");
  }

  std::mt19937_64 engine(seed);
  Permutation identity(n_options);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::set<Permutation> seen;
  std::vector<Permutation> out;
  out.reserve(count);
  while (out.size() < count) {
    Permutation p = identity;
    for (std::size_t i = n_options; i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(engine, i));
      std::swap(p[i - 1], p[j]);
    }
    if (p == identity || !seen.insert(p).second) continue;
    out.push_back(std::move(p));
  }
  return out;
}

PromptTemplate load_template(const std::filesystem::path& path) {
  return from_json(read_json_file(path), path.string());
}

std::map<std::string, PromptTemplate> load_language_pack(
    const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("templates") ||
      !doc.at("templates").is_object()) {
    throw Error(ErrorCode::kTemplate,
                path.string() + ": expected an object with 'templates'");
  }
  std::map<std::string, PromptTemplate> out;
  for (const auto& [id, body] : doc.at("templates").items()) {
    json copy = body;
    copy["template_id"] = id;
    if (doc.contains("language") && !copy.contains("language")) {
      copy["language"] = doc.at("language");
    }
    out.emplace(id, from_json(copy, path.string() + ":" + id));
  }
  return out;
}

}  // namespace mcqa
