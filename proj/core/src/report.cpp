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

#include "mcqa/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mcqa/config.hpp"
#include "mcqa/error.hpp"
#include "mcqa/version.hpp"
#include "number_format.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

constexpr const char* kNormalization = "softmax over candidate labels";
constexpr const char* kBinning = "((m-1)/M, m/M], 0 in first bin";
constexpr const char* kBootstrapP = "fraction of resampled deltas <= 0";
constexpr const char* kCiMethod = "percentile (type 7), 2.5/97.5";

json bins_json(const ReliabilityBins& bins) {
  json out = json::array();
  for (const auto& b : bins.bins) {
    json j = {{"low", b.low}, {"high", b.high}, {"count", b.count}};
    if (b.accuracy) j["accuracy"] = *b.accuracy;
    if (b.mean_confidence) j["mean_confidence"] = *b.mean_confidence;
    out.push_back(std::move(j));
  }
  return out;
}

json result_json(const RunResult& r) {
  return {{"n", r.n},
          {"accuracy", r.accuracy},
          {"ece", r.ece},
          {"strategy", r.strategy},
          {"template_id", r.template_id},
          {"model_id", r.model_id},
          {"dataset_id", r.dataset_id},
          {"num_bins", r.bins.num_bins},
          {"bins", bins_json(r.bins)}};
}

json mcnemar_json(const McNemarResult& m) {
  return {{"b", m.b},
          {"c", m.c},
          {"p_value", m.p_value},
          {"sidedness", std::string(to_string(m.sidedness))},
          {"method", std::string(to_string(m.method))}};
}

json bootstrap_json(const BootstrapResult& b) {
  return {{"observed_delta", b.observed_delta},
          {"p_value", b.p_value},
          {"iterations", b.iterations},
          {"seed", b.seed},
          {"num_bins", b.num_bins},
          {"ci_95", {b.ci_low, b.ci_high}},
          {"p_value_definition", kBootstrapP},
          {"ci_method", kCiMethod}};
}

json row_json(const ComparisonRow& row) {
  return {{"model_id", row.model_id},
          {"letter", result_json(row.letter)},
          {"space_letter", result_json(row.space)},
          {"accuracy_delta", row.accuracy_delta},
          {"mcnemar", mcnemar_json(row.mcnemar)},
          {"bootstrap", bootstrap_json(row.bootstrap)},
          {"accuracy_significant", is_significant(row.mcnemar.p_value)},
          {"ece_significant", is_significant(row.bootstrap.p_value)},
          {"strategy_identical", row.strategy_identical},
          {"predictions_identical", row.predictions_identical},
          {"multi_token_labels", row.multi_token_labels},
          {"cot", row.cot}};
}

json report_json(const ComparisonReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  return {{"dataset_id", r.dataset_id},
          {"template_id", r.template_id},
          {"shots", r.shots},
          {"cot", r.cot},
          {"bootstrap_iterations", r.bootstrap_iterations},
          {"bootstrap_seed", r.bootstrap_seed},
          {"sidedness", std::string(to_string(r.sidedness))},
          {"significance_level", kSignificanceLevel},
          {"rows", std::move(rows)}};
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  // Width counts code points so that UTF-8 model names line up.
  std::size_t cps = 0;
  for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
  if (cps >= width) return s;
  const std::string fill(width - cps, ' ');
  return left ? s + fill : fill + s;
}

std::string p_text(double p) {
  if (p < 1e-4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", p);
    return buf;
  }
  return detail::fixed(p, 4);
}

// Renders rows of cells with the first column left-aligned.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::size_t cps = 0;
      for (unsigned char ch : row[i]) cps += (ch & 0xC0) != 0x80;
      widths[i] = std::max(widths[i], cps);
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      line += pad(row[i], widths[i], i == 0);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<RunResult> side_from_json(const json& entry, const char* inline_key,
                                        const char* report_key,
                                        const std::filesystem::path& base) {
  RunResult r;
  if (entry.contains(inline_key)) {
    const json& j = entry.at(inline_key);
    r.accuracy = j.at("accuracy").get<double>();
    r.ece = j.value("ece", 0.0);
    r.n = j.value("n", std::size_t{0});
    return r;
  }
  if (entry.contains(report_key)) {
    std::filesystem::path p = entry.at(report_key).get<std::string>();
    if (p.is_relative()) p = base / p;
    const json report = json::parse(read_file(p));
    const json& res = report.at("result");
    r.accuracy = res.at("accuracy").get<double>();
    r.ece = res.at("ece").get<double>();
    r.n = res.at("n").get<std::size_t>();
    r.strategy = res.value("strategy", "");
    return r;
  }
  return std::nullopt;
}

}  // namespace

std::string percent(double fraction) { return detail::fixed(fraction * 100.0, 2); }

std::string run_report_json(const RunConfig& cfg, const RunOutput& run) {
  json records = json::array();
  for (const auto& r : run.records) {
    json j = {{"example_id", r.example_id},
              {"gold_index", r.gold_index},
              {"logits", r.logits},
              {"distribution", r.result.distribution},
              {"predicted_index", r.result.predicted_index},
              {"confidence", r.result.confidence},
              {"correct", r.result.correct},
              {"request_signature", r.request_signature},
              {"multi_token_labels", r.multi_token_labels},
              {"from_cache", r.from_cache}};
    if (r.generated) j["generated"] = *r.generated;
    records.push_back(std::move(j));
  }
  const json out = {{"version", kVersion},
                    {"config", json::parse(run_config_to_json(cfg))},
                    {"seeds",
                     {{"exemplar_seed", cfg.seed},
                      {"bootstrap_seed", cfg.bootstrap_seed}}},
                    {"conventions",
                     {{"normalization", kNormalization},
                      {"binning", kBinning},
                      {"tie_break", "lowest option index"},
                      {"multi_token_labels",
                       "all tokens but the last appended to the prompt"}}},
                    {"permutation", cfg.permutation_tag},
                    {"backend_calls", run.backend_calls},
                    {"cache_hits", run.cache_hits},
                    {"multi_token_labels", run.multi_token_labels},
                    {"result", result_json(run.result)},
                    {"records", std::move(records)}};
  return out.dump(2) + "\n";
}

std::string comparison_report_json(const RunConfig& cfg,
                                   const ComparisonReport& report) {
  json out = report_json(report);
  out["version"] = kVersion;
  out["config"] = json::parse(run_config_to_json(cfg));
  out["conventions"] = {{"normalization", kNormalization}, {"binning", kBinning}};
  return out.dump(2) + "\n";
}

std::string comparison_table(const ComparisonReport& report) {
  std::string out = "dataset: " + report.dataset_id +
                    "  template: " + report.template_id +
                    "  shots: " + std::to_string(report.shots) +
                    "  CoT: " + yes_no(report.cot) + "\n";
  out += "A = \"X\" (letter), B = \"\xE2\x90\xA3X\" (space-letter); "
         "accuracy and ECE x100\n";
  out += "McNemar: exact binomial, " +
         std::string(report.sidedness == Sidedness::kTwoSided
                         ? "two-sided"
                         : "one-sided (B better)") +
         "; ECE bootstrap: " + std::to_string(report.bootstrap_iterations) +
         " iterations, seed " + std::to_string(report.bootstrap_seed) + "\n\n";

  std::vector<std::vector<std::string>> rows = {
      {"Model", "Acc A", "Acc B", "ECE A", "ECE B", "McNemar p", "Bootstrap p",
       "Notes"}};
  bool any_identical = false;
  bool any_multi = false;
  bool any_cot = false;
  for (const auto& r : report.rows) {
    const char* acc_mark = r.cot ? "+" : "*";
    std::string acc_a = percent(r.letter.accuracy);
    std::string acc_b = percent(r.space.accuracy);
    if (is_significant(r.mcnemar.p_value)) {
      (r.space.accuracy >= r.letter.accuracy ? acc_b : acc_a) += acc_mark;
    }
    std::string ece_a = percent(r.letter.ece);
    std::string ece_b = percent(r.space.ece);
    if (is_significant(r.bootstrap.p_value)) {
      (r.space.ece <= r.letter.ece ? ece_b : ece_a) += "*";
    }
    std::string notes;
    if (r.strategy_identical) {
      notes += "[1]";
      any_identical = true;
    }
    if (r.multi_token_labels) {
      notes += "[2]";
      any_multi = true;
    }
    any_cot = any_cot || r.cot;
    rows.push_back({r.model_id, acc_a, acc_b, ece_a, ece_b,
                    p_text(r.mcnemar.p_value), p_text(r.bootstrap.p_value),
                    notes});
  }
  out += render_table(rows);
  out += "\n* p < 0.05";
  if (any_cot) out += "; + accuracy p < 0.05 under CoT";
  out += "\n";
  if (any_identical) {
    out += "[1] both strategies sent token-identical requests; results are "
           "identical by construction\n";
  }
  if (any_multi) {
    out += "[2] some labels span several tokens; all but the last token were "
           "appended to the prompt\n";
  }
  return out;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out =
      "model_id,n,accuracy_a,accuracy_b,accuracy_delta,ece_a,ece_b,mcnemar_b,"
      "mcnemar_c,"
      "mcnemar_p,accuracy_significant,ece_delta,bootstrap_p,ci_low,ci_high,"
      "ece_significant,strategy_identical,predictions_identical,"
      "multi_token_labels,cot\n";
  for (const auto& r : report.rows) {
    auto b = [](bool v) { return std::string(v ? "1" : "0"); };
    out += csv_field(r.model_id) + "," + std::to_string(r.letter.n) + "," +
           detail::shortest(r.letter.accuracy) + "," +
           detail::shortest(r.space.accuracy) + "," +
           detail::shortest(r.accuracy_delta) + "," +
           detail::shortest(r.letter.ece) + "," + detail::shortest(r.space.ece) +
           "," + std::to_string(r.mcnemar.b) + "," + std::to_string(r.mcnemar.c) +
           "," + detail::shortest(r.mcnemar.p_value) + "," +
           b(is_significant(r.mcnemar.p_value)) + "," +
           detail::shortest(r.bootstrap.observed_delta) + "," +
           detail::shortest(r.bootstrap.p_value) + "," +
           detail::shortest(r.bootstrap.ci_low) + "," +
           detail::shortest(r.bootstrap.ci_high) + "," +
           b(is_significant(r.bootstrap.p_value)) +
           "," + b(r.strategy_identical) + "," + b(r.predictions_identical) +
           "," + b(r.multi_token_labels) + "," + b(r.cot) + "\n";
  }
  return out;
}

std::string leaderboard_table(const LeaderboardReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"Rank", "Model (A = \"X\")", "Acc", "Model (B = \"\xE2\x90\xA3X\")", "Acc"}};
  for (std::size_t i = 0; i < report.ranking_letter.size(); ++i) {
    const auto& a = report.ranking_letter[i];
    const auto& b = report.ranking_space[i];
    rows.push_back({std::to_string(i + 1), a.model_id, percent(a.accuracy),
                    b.model_id, percent(b.accuracy)});
  }
  std::string out = render_table(rows);
  out += "\nrank flip: " + yes_no(report.rank_flip);
  if (report.rank_flip) {
    out += " (top A: " + report.top_letter + ", top B: " + report.top_space + ")";
  }
  return out + "\n";
}

std::string leaderboard_json(const LeaderboardReport& report) {
  auto ranking = [](const std::vector<LeaderboardEntry>& v) {
    json out = json::array();
    for (const auto& e : v) {
      out.push_back({{"model_id", e.model_id}, {"accuracy", e.accuracy}});
    }
    return out;
  };
  const json out = {{"ranking_letter", ranking(report.ranking_letter)},
                    {"ranking_space_letter", ranking(report.ranking_space)},
                    {"rank_flip", report.rank_flip},
                    {"top_letter", report.top_letter},
                    {"top_space_letter", report.top_space},
                    {"tie_break", "model id, lexicographic"}};
  return out.dump(2) + "\n";
}

std::string permutation_suite_table(const PermutationSuiteReport& report) {
  std::string out;
  for (const auto& [n, perms] : report.permutations) {
    out += "permutations for " + std::to_string(n) + " options:";
    for (const auto& p : perms) {
      out += " [";
      for (std::size_t i = 0; i < p.size(); ++i) {
        out += (i ? "," : "") + std::to_string(p[i]);
      }
      out += "]";
    }
    out += "\n";
  }
  out += "\n";
  std::vector<std::vector<std::string>> rows = {
      {"Permutation", "Acc A", "Acc B", "ECE A", "ECE B", "McNemar p",
       "Bootstrap p"}};
  for (std::size_t k = 0; k < report.per_permutation.size(); ++k) {
    for (const auto& r : report.per_permutation[k].rows) {
      std::string acc_b = percent(r.space.accuracy);
      std::string acc_a = percent(r.letter.accuracy);
      if (is_significant(r.mcnemar.p_value)) {
        (r.space.accuracy >= r.letter.accuracy ? acc_b : acc_a) +=
            r.cot ? "+" : "*";
      }
      std::string ece_a = percent(r.letter.ece);
      std::string ece_b = percent(r.space.ece);
      if (is_significant(r.bootstrap.p_value)) {
      (r.space.ece <= r.letter.ece ? ece_b : ece_a) += "*";
    }
      rows.push_back({"#" + std::to_string(k + 1), acc_a, acc_b, ece_a, ece_b,
                      p_text(r.mcnemar.p_value), p_text(r.bootstrap.p_value)});
    }
  }
  rows.push_back({"avg.", percent(report.mean_accuracy_letter),
                  percent(report.mean_accuracy_space),
                  percent(report.mean_ece_letter),
                  percent(report.mean_ece_space), "", ""});
  out += render_table(rows);
  out += "\nsignificant (p < 0.05): accuracy " +
         std::to_string(report.accuracy_significant_count) + "/" +
         std::to_string(report.per_permutation.size()) + ", ECE " +
         std::to_string(report.ece_significant_count) + "/" +
         std::to_string(report.per_permutation.size()) + "\n";
  return out;
}

std::string permutation_suite_json(const PermutationSuiteReport& report) {
  json perms = json::array();
  for (const auto& [n, list] : report.permutations) {
    perms.push_back({{"n_options", n}, {"permutations", list}});
  }
  json per = json::array();
  for (const auto& r : report.per_permutation) per.push_back(report_json(r));
  const json out = {{"version", kVersion},
                    {"permutations", std::move(perms)},
                    {"per_permutation", std::move(per)},
                    {"mean",
                     {{"accuracy_a", report.mean_accuracy_letter},
                      {"accuracy_b", report.mean_accuracy_space},
                      {"ece_a", report.mean_ece_letter},
                      {"ece_b", report.mean_ece_space}}},
                    {"accuracy_significant_count",
                     report.accuracy_significant_count},
                    {"ece_significant_count", report.ece_significant_count}};
  return out.dump(2) + "\n";
}

std::vector<ModelRuns> load_leaderboard_input(const std::filesystem::path& path) {
  const std::filesystem::path base = path.parent_path();
  std::vector<ModelRuns> out;
  try {
    const json j = json::parse(read_file(path));
    for (const json& entry : j.at("models")) {
      ModelRuns m;
      m.model_id = entry.at("model_id").get<std::string>();
      m.letter = side_from_json(entry, "letter", "letter_report", base);
      m.space = side_from_json(entry, "space", "space_report", base);
      out.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                "bad leaderboard input " + path.string() + ": " + e.what());
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw Error(ErrorCode::kFileUnreadable, "cannot write " + path.string());
  }
}

}  // namespace mcqa
