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

#include "mcqa/cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "json.hpp"
#include "mcqa/error.hpp"
#include "mcqa/fingerprint.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

json key_json(const CacheKey& k) {
  return {{"dataset_id", k.dataset_id},
          {"example_id", k.example_id},
          {"model_id", k.model_id},
          {"template_fingerprint", k.template_fingerprint},
          {"strategy", std::string(to_string(k.strategy))},
          {"shots", k.shots},
          {"exemplar_seed", k.exemplar_seed},
          {"cot", k.cot},
          {"permutation", k.permutation_tag}};
}

json entry_json(const CacheEntry& e) {
  json j = {{"key", key_json(e.key)},
            {"request_signature", e.request_signature},
            {"logits", e.logits}};
  if (e.generated) j["generated"] = *e.generated;
  return j;
}

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

std::string CacheKey::canonical() const { return key_json(*this).dump(); }

std::string CacheKey::fingerprint() const { return sha256_hex(canonical()); }

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot create cache directory " + dir_.string() + ": " +
                    ec.message());
  }
}

std::filesystem::path ResultCache::path_for(const CacheKey& key) const {
  return dir_ / (key.fingerprint() + ".json");
}

std::optional<CacheEntry> ResultCache::get(const CacheKey& key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.at("key") != key_json(key)) {
      throw Error(ErrorCode::kCacheConflict,
                  "cache entry " + path.string() + " belongs to another key");
    }
    CacheEntry e;
    e.key = key;
    e.request_signature = j.at("request_signature").get<std::string>();
    e.logits = j.at("logits").get<std::vector<double>>();
    if (j.contains("generated")) e.generated = j.at("generated").get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kCacheConflict,
                "unreadable cache entry " + path.string() + ": " + ex.what());
  }
}

void ResultCache::put(const CacheEntry& entry) const {
  const auto path = path_for(entry.key);
  if (auto existing = get(entry.key)) {
    if (existing->request_signature != entry.request_signature ||
        existing->logits != entry.logits ||
        existing->generated != entry.generated) {
      throw Error(ErrorCode::kCacheConflict,
                  "cache entry " + path.string() +
                      " already holds a different value")
          .with_example_ids({entry.key.example_id});
    }
    return;
  }
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp."
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << temp_counter++;
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kFileUnreadable,
                  "cannot write cache file " + tmp.string());
    }
    out << entry_json(entry).dump(2) << "\n";
    if (!out.flush()) {
      throw Error(ErrorCode::kFileUnreadable,
                  "cannot write cache file " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kFileUnreadable,
                "cannot move cache entry into place: " + path.string());
  }
}

}  // namespace mcqa
