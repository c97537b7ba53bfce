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

// Run configuration files (JSON). Relative paths are resolved against the
// directory holding the config file.
//
//   {
//     "dataset": "mmlu.jsonl", "vocab": "llama.vocab", "model": "m",
//     "backend": {"kind": "mock", "spec": "mock.json"},
//     "template": "base", "variation": "numbers", "strategy": "letter",
//     "shots": 5, "exemplars": "dev.jsonl", "seed": 1, "cot": false,
//     "bootstrap": {"iterations": 10000, "seed": 0}, "bins": 10,
//     "parallelism": 4, "cache_dir": "cache"
//   }
//
// Unknown keys are rejected.

#ifndef MCQA_CONFIG_HPP_
#define MCQA_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "mcqa/harness.hpp"

namespace mcqa {

RunConfig load_run_config(const std::filesystem::path& path);

RunConfig parse_run_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});

// Inverse of parse_run_config (paths are written as given). Bearer tokens
// are never written.
std::string run_config_to_json(const RunConfig& cfg);

ApiStyle parse_api_style(std::string_view text);
std::string_view to_string(ApiStyle style);

Sidedness parse_sidedness(std::string_view text);

}  // namespace mcqa

#endif  // MCQA_CONFIG_HPP_
