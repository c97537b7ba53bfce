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

#ifndef MCQA_CACHE_HPP_
#define MCQA_CACHE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcqa/tokenizer.hpp"

namespace mcqa {

struct CacheKey {
  std::string dataset_id;
  std::string example_id;
  std::string model_id;
  std::string template_fingerprint;
  TokenizationStrategy strategy = TokenizationStrategy::kLetterOnly;
  std::size_t shots = 0;
  std::uint64_t exemplar_seed = 0;
  bool cot = false;
  std::string permutation_tag = "identity";

  // Canonical JSON of the fields; hashed into the entry's file name.
  std::string canonical() const;
  std::string fingerprint() const;
};

struct CacheEntry {
  CacheKey key;
  // Fingerprint of the exact score requests; a mismatch on read means the
  // entry was produced from different prompts and is refused.
  std::string request_signature;
  std::vector<double> logits;  // one per option
  std::optional<std::string> generated;  // CoT reasoning, when used
};

// One immutable JSON file per entry under `dir`. Writes go to a temporary
// file and are renamed into place, so concurrent writers never expose a
// partial entry. Safe for concurrent use.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const CacheKey& key) const;

  std::optional<CacheEntry> get(const CacheKey& key) const;
  // No-op when an identical entry already exists; throws kCacheConflict when
  // a different value is stored under the same key.
  void put(const CacheEntry& entry) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace mcqa

#endif  // MCQA_CACHE_HPP_
