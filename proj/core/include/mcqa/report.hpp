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

// Report rendering. Text tables print accuracy and ECE x100 with two
// decimals; JSON and CSV outputs keep unscaled fractions.
//
// Significance markers in comparison tables:
//   *  accuracy difference with McNemar p < 0.05 (non-CoT rows)
//   +  accuracy difference with McNemar p < 0.05 (CoT rows)
//   *  ECE difference with bootstrap p < 0.05
// The marker sits on the better side of the pair.

#ifndef MCQA_REPORT_HPP_
#define MCQA_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "mcqa/harness.hpp"

namespace mcqa {

// x100, two decimals: 0.8231 -> "82.31".
std::string percent(double fraction);

// Full run record: config, seeds, library version, normalization and binning
// conventions, aggregates, reliability bins and per-example records.
std::string run_report_json(const RunConfig& cfg, const RunOutput& run);

std::string comparison_report_json(const RunConfig& cfg,
                                   const ComparisonReport& report);
std::string comparison_table(const ComparisonReport& report);
std::string comparison_csv(const ComparisonReport& report);

std::string leaderboard_table(const LeaderboardReport& report);
std::string leaderboard_json(const LeaderboardReport& report);

std::string permutation_suite_table(const PermutationSuiteReport& report);
std::string permutation_suite_json(const PermutationSuiteReport& report);

// Leaderboard input:
//   {"models": [{"model_id": "m1",
//                "letter": {"accuracy": 0.8231},   // or "letter_report"
//                "space":  {"accuracy": 0.8176}}]} // or "space_report"
// `*_report` names a run report written by run_report_json, relative to the
// input file.
std::vector<ModelRuns> load_leaderboard_input(const std::filesystem::path& path);

// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mcqa

#endif  // MCQA_REPORT_HPP_
