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

#ifndef MCQA_DATASET_HPP_
#define MCQA_DATASET_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa/prompt.hpp"

namespace mcqa {

// JSONL, one object per line:
//   {"id": str, "question": str, "options": [str...], "answer": int,
//    "subject"?: str, "language"?: str}
// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<Question> load_dataset(const std::filesystem::path& path);
std::vector<Question> parse_dataset(std::string_view jsonl,
                                    std::string_view origin = "<memory>");

std::string to_jsonl(const std::vector<Question>& questions);

}  // namespace mcqa

#endif  // MCQA_DATASET_HPP_
