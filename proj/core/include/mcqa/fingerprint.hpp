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

#ifndef MCQA_FINGERPRINT_HPP_
#define MCQA_FINGERPRINT_HPP_

#include <string>
#include <string_view>

namespace mcqa {

// Lower-case hex SHA-256 of the UTF-8 bytes of `text`. Used as the stable,
// content-derived fingerprint for prompts, templates and cache keys.
std::string sha256_hex(std::string_view text);

inline std::string prompt_fingerprint(std::string_view prompt) {
  return sha256_hex(prompt);
}

}  // namespace mcqa

#endif  // MCQA_FINGERPRINT_HPP_
