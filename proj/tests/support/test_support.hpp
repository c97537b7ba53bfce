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

#ifndef MCQA_TESTS_TEST_SUPPORT_HPP_
#define MCQA_TESTS_TEST_SUPPORT_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mcqa/error.hpp"

namespace mcqa::testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(MCQA_TEST_DATA_DIR) / rel;
}

inline std::filesystem::path templates_path(const std::string& rel) {
  return std::filesystem::path(MCQA_TEMPLATES_DIR) / rel;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("mcqa-" + name + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mcqa::testing

// Expects `stmt` to throw mcqa::Error with code `expected`.
#define EXPECT_MCQA_ERROR(stmt, expected)                                   \
  do {                                                                      \
    try {                                                                   \
      stmt;                                                                 \
      ADD_FAILURE() << "expected " << ::mcqa::to_string(expected)           \
                    << " from: " #stmt;                                     \
    } catch (const ::mcqa::Error& e) {                                      \
      EXPECT_EQ(e.code(), expected)                                         \
          << "got " << ::mcqa::to_string(e.code()) << ": " << e.what();     \
    }                                                                       \
  } while (0)

#endif  // MCQA_TESTS_TEST_SUPPORT_HPP_
