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

#include "mcqa/scoring.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mcqa/error.hpp"
#include "mcqa/fingerprint.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

void validate_request(const ScoreRequest& req) {
  if (req.prompt.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "score request has empty prompt");
  }
  if (req.candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "score request has no candidates");
  }
  std::set<std::string_view> seen;
  for (const auto& c : req.candidates) {
    if (!seen.insert(c).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate candidate '" + c + "' in score request");
    }
  }
}

// Cuts `text` after `max_tokens` whitespace-delimited words. The mock has no
// tokenizer, so words stand in for tokens.
std::string truncate_words(std::string_view text, int max_tokens) {
  int words = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t word_end = i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == text.size()) break;
    if (words == max_tokens) return std::string(text.substr(0, word_end));
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    ++words;
  }
  return std::string(text);
}

std::string key_of(const json& entry) {
  if (entry.contains("fingerprint")) {
    return entry.at("fingerprint").get<std::string>();
  }
  const std::string prompt = entry.at("prompt").get<std::string>();
  if (prompt == MockBackendSpec::kAnyPrompt) return prompt;
  return prompt_fingerprint(prompt);
}

}  // namespace

std::string truncate_at_stop(std::string_view text,
                             const std::vector<std::string>& stop) {
  std::size_t cut = text.size();
  for (const auto& s : stop) {
    if (s.empty()) continue;
    const auto hit = text.find(s);
    if (hit != std::string_view::npos) cut = std::min(cut, hit);
  }
  return std::string(text.substr(0, cut));
}

ScoreResponse ScoringBackend::score_candidates(const ScoreRequest& req) {
  validate_request(req);
  ScoreResponse resp = do_score(req);
  if (resp.logits.size() != req.candidates.size()) {
    throw Error(ErrorCode::kMalformedResponse,
                "backend returned " + std::to_string(resp.logits.size()) +
                    " logits for " + std::to_string(req.candidates.size()) +
                    " candidates");
  }
  for (double v : resp.logits) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kMalformedResponse,
                  "backend returned a non-finite logit");
    }
  }
  return resp;
}

std::string ScoringBackend::generate_greedy(
    std::string_view prompt, int max_tokens,
    const std::vector<std::string>& stop) {
  if (max_tokens < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  }
  GenerateRequest req{std::string(prompt), max_tokens, stop};
  return truncate_at_stop(do_generate(req), stop);
}

void MockBackendSpec::set_score(std::string_view prompt, std::string candidate,
                                double logit) {
  std::string key = prompt == kAnyPrompt ? std::string(kAnyPrompt)
                                         : prompt_fingerprint(prompt);
  scores[{std::move(key), std::move(candidate)}] = logit;
}

void MockBackendSpec::set_generation(std::string_view prompt,
                                     std::string text) {
  std::string key = prompt == kAnyPrompt ? std::string(kAnyPrompt)
                                         : prompt_fingerprint(prompt);
  generations[std::move(key)] = std::move(text);
}

MockBackendSpec parse_mock_spec(std::string_view json_text) {
  MockBackendSpec spec;
  try {
    const json doc = json::parse(json_text);
    spec.default_logit = doc.value("default_logit", 0.0);
    if (!std::isfinite(spec.default_logit)) {
      throw Error(ErrorCode::kConfig, "mock default_logit must be finite");
    }
    for (const json& e : doc.value("scores", json::array())) {
      const double logit = e.at("logit").get<double>();
      spec.scores[{key_of(e), e.at("candidate").get<std::string>()}] = logit;
    }
    for (const json& e : doc.value("generations", json::array())) {
      spec.generations[key_of(e)] = e.at("text").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("mock spec: ") + e.what());
  }
  return spec;
}

MockBackendSpec load_mock_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileUnreadable,
                "cannot open mock spec: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mock_spec(buf.str());
}

std::string mock_spec_to_json(const MockBackendSpec& spec) {
  json doc = {{"default_logit", spec.default_logit},
              {"scores", json::array()},
              {"generations", json::array()}};
  for (const auto& [key, logit] : spec.scores) {
    json e = {{"candidate", key.second}, {"logit", logit}};
    if (key.first == MockBackendSpec::kAnyPrompt) {
      e["prompt"] = key.first;
    } else {
      e["fingerprint"] = key.first;
    }
    doc["scores"].push_back(std::move(e));
  }
  for (const auto& [key, text] : spec.generations) {
    json e = {{"text", text}};
    if (key == MockBackendSpec::kAnyPrompt) {
      e["prompt"] = key;
    } else {
      e["fingerprint"] = key;
    }
    doc["generations"].push_back(std::move(e));
  }
  return doc.dump(2);
}

MockBackend::MockBackend(MockBackendSpec spec) : spec_(std::move(spec)) {}

ScoreResponse MockBackend::do_score(const ScoreRequest& req) {
  ++calls_;
  const std::string fp = prompt_fingerprint(req.prompt);
  ScoreResponse resp;
  resp.logits.reserve(req.candidates.size());
  for (const auto& c : req.candidates) {
    auto it = spec_.scores.find({fp, c});
    if (it == spec_.scores.end()) {
      it = spec_.scores.find({std::string(MockBackendSpec::kAnyPrompt), c});
    }
    resp.logits.push_back(it != spec_.scores.end() ? it->second
                                                   : spec_.default_logit);
  }
  return resp;
}

std::string MockBackend::do_generate(const GenerateRequest& req) {
  ++calls_;
  auto it = spec_.generations.find(prompt_fingerprint(req.prompt));
  if (it == spec_.generations.end()) {
    it = spec_.generations.find(std::string(MockBackendSpec::kAnyPrompt));
  }
  if (it == spec_.generations.end()) return {};
  return truncate_words(truncate_at_stop(it->second, req.stop),
                        req.max_tokens);
}

}  // namespace mcqa
