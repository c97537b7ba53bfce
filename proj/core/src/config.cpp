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

#include "mcqa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mcqa/error.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    std::string_view where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) {
      throw Error(ErrorCode::kConfig, "unknown key '" + k + "' in " +
                                          std::string(where));
    }
  }
}

class Reader {
 public:
  Reader(const json& j, std::filesystem::path base)
      : j_(j), base_(std::move(base)) {}

  template <typename T>
  void get(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kConfig,
                  std::string("config key '") + key + "' has the wrong type");
    }
  }

  void path(const char* key, std::filesystem::path& out) const {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_absolute() || base_.empty() ? p : base_ / p;
  }

 private:
  const json& j_;
  std::filesystem::path base_;
};

}  // namespace

ApiStyle parse_api_style(std::string_view text) {
  if (text == "native") return ApiStyle::kNative;
  if (text == "echo-logprobs") return ApiStyle::kEchoLogprobs;
  throw Error(ErrorCode::kConfig, "unknown api style '" + std::string(text) +
                                      "' (expected native|echo-logprobs)");
}

std::string_view to_string(ApiStyle style) {
  return style == ApiStyle::kNative ? "native" : "echo-logprobs";
}

Sidedness parse_sidedness(std::string_view text) {
  if (text == "one-sided" || text == to_string(Sidedness::kOneSidedBGreater)) {
    return Sidedness::kOneSidedBGreater;
  }
  if (text == "two-sided" || text == to_string(Sidedness::kTwoSided)) {
    return Sidedness::kTwoSided;
  }
  throw Error(ErrorCode::kConfig, "unknown sidedness '" + std::string(text) +
                                      "' (expected one-sided|two-sided)");
}

RunConfig parse_run_config(std::string_view json_text,
                           const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be an object");
  reject_unknown(j,
                 {"dataset", "dataset_id", "vocab", "model", "backend",
                  "template", "variation", "language", "template_pack",
                  "roles", "strategy", "shots", "exemplars", "seed", "cot",
                  "cot_max_tokens", "permutations", "bootstrap", "sidedness",
                  "bins", "parallelism", "cache_dir"},
                 "config");

  RunConfig cfg;
  const Reader r(j, base_dir);
  r.path("dataset", cfg.dataset_path);
  r.get("dataset_id", cfg.dataset_id);
  r.path("vocab", cfg.vocab_path);
  r.get("model", cfg.model_id);
  r.get("template", cfg.template_id);
  r.get("language", cfg.language);
  r.path("template_pack", cfg.template_pack);
  r.get("shots", cfg.shots);
  r.path("exemplars", cfg.exemplar_path);
  r.get("seed", cfg.seed);
  r.get("cot", cfg.cot);
  r.get("cot_max_tokens", cfg.cot_max_tokens);
  r.get("bins", cfg.num_bins);
  r.get("parallelism", cfg.parallelism);
  r.path("cache_dir", cfg.cache_dir);

  std::string text;
  if (j.contains("variation")) {
    r.get("variation", text);
    cfg.variation = parse_variation(text);
  }
  if (j.contains("strategy")) {
    r.get("strategy", text);
    cfg.strategy = parse_strategy(text);
  }
  if (j.contains("sidedness")) {
    r.get("sidedness", text);
    cfg.sidedness = parse_sidedness(text);
  }

  if (j.contains("backend")) {
    const json& b = j.at("backend");
    reject_unknown(b, {"kind", "spec", "url", "api_style", "model", "token_env",
                       "max_retries", "timeout_seconds"},
                   "backend");
    const Reader br(b, base_dir);
    std::string kind = "mock";
    br.get("kind", kind);
    if (kind == "mock") {
      cfg.backend.kind = BackendDescriptor::Kind::kMock;
      br.path("spec", cfg.backend.mock_spec);
    } else if (kind == "endpoint") {
      cfg.backend.kind = BackendDescriptor::Kind::kEndpoint;
      auto& e = cfg.backend.endpoint;
      br.get("url", e.base_url);
      std::string style = "native";
      br.get("api_style", style);
      e.api_style = parse_api_style(style);
      br.get("model", e.model);
      br.get("max_retries", e.max_retries);
      long timeout = e.timeout.count();
      br.get("timeout_seconds", timeout);
      e.timeout = std::chrono::seconds(timeout);
      std::string token_env;
      br.get("token_env", token_env);
      if (!token_env.empty()) {
        if (const char* v = std::getenv(token_env.c_str())) e.bearer_token = v;
      }
    } else {
      throw Error(ErrorCode::kConfig, "backend kind must be mock|endpoint");
    }
  }

  if (j.contains("roles")) {
    const json& roles = j.at("roles");
    reject_unknown(roles, {"system", "system_text", "user", "assistant"}, "roles");
    RoleWrappers w;
    const Reader rr(roles, base_dir);
    rr.get("system", w.system_marker);
    rr.get("system_text", w.system_text);
    rr.get("user", w.user_marker);
    rr.get("assistant", w.assistant_marker);
    cfg.roles = w;
  }
  if (j.contains("permutations")) {
    const json& p = j.at("permutations");
    reject_unknown(p, {"count", "seed"}, "permutations");
    PermutationSpec spec;
    const Reader pr(p, base_dir);
    pr.get("count", spec.count);
    pr.get("seed", spec.seed);
    cfg.permutations = spec;
  }
  if (j.contains("bootstrap")) {
    const json& b = j.at("bootstrap");
    reject_unknown(b, {"iterations", "seed"}, "bootstrap");
    const Reader br(b, base_dir);
    br.get("iterations", cfg.bootstrap_iterations);
    br.get("seed", cfg.bootstrap_seed);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot read config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j = {{"dataset", cfg.dataset_path.string()},
            {"vocab", cfg.vocab_path.string()},
            {"model", cfg.model_id},
            {"template", cfg.template_id},
            {"language", cfg.language},
            {"strategy", std::string(to_string(cfg.strategy))},
            {"shots", cfg.shots},
            {"seed", cfg.seed},
            {"cot", cfg.cot},
            {"cot_max_tokens", cfg.cot_max_tokens},
            {"bootstrap",
             {{"iterations", cfg.bootstrap_iterations},
              {"seed", cfg.bootstrap_seed}}},
            {"sidedness", cfg.sidedness == Sidedness::kTwoSided ? "two-sided"
                                                                 : "one-sided"},
            {"bins", cfg.num_bins},
            {"parallelism", cfg.parallelism}};
  if (!cfg.dataset_id.empty()) j["dataset_id"] = cfg.dataset_id;
  if (!cfg.template_pack.empty()) j["template_pack"] = cfg.template_pack.string();
  if (!cfg.exemplar_path.empty()) j["exemplars"] = cfg.exemplar_path.string();
  if (!cfg.cache_dir.empty()) j["cache_dir"] = cfg.cache_dir.string();
  if (cfg.variation) j["variation"] = std::string(to_string(*cfg.variation));
  if (cfg.backend.kind == BackendDescriptor::Kind::kMock) {
    j["backend"] = {{"kind", "mock"}, {"spec", cfg.backend.mock_spec.string()}};
  } else {
    const auto& e = cfg.backend.endpoint;
    j["backend"] = {{"kind", "endpoint"},
                    {"url", e.base_url},
                    {"api_style", std::string(to_string(e.api_style))},
                    {"model", e.model},
                    {"max_retries", e.max_retries},
                    {"timeout_seconds", e.timeout.count()}};
  }
  if (cfg.roles) {
    j["roles"] = {{"system", cfg.roles->system_marker},
                  {"system_text", cfg.roles->system_text},
                  {"user", cfg.roles->user_marker},
                  {"assistant", cfg.roles->assistant_marker}};
  }
  if (cfg.permutations) {
    j["permutations"] = {{"count", cfg.permutations->count},
                         {"seed", cfg.permutations->seed}};
  }
  return j.dump(2);
}

}  // namespace mcqa
