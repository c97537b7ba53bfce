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

#ifndef MCQA_SRC_NUMBER_FORMAT_HPP_
#define MCQA_SRC_NUMBER_FORMAT_HPP_

#include <array>
#include <charconv>
#include <cstdio>
#include <string>

namespace mcqa::detail {

// Shortest decimal that round-trips to the same double.
inline std::string shortest(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Fixed-point with `decimals` digits, e.g. fixed(82.3112, 2) == "82.31".
inline std::string fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  return buf.data();
}

}  // namespace mcqa::detail

#endif  // MCQA_SRC_NUMBER_FORMAT_HPP_
