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

#ifndef MCQA_HTTP_BACKEND_HPP_
#define MCQA_HTTP_BACKEND_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "mcqa/scoring.hpp"

namespace mcqa {

enum class ApiStyle {
  // POST /v1/score and /v1/generate (the harness wire protocol).
  kNative,
  // Reference mapping onto completion APIs that echo prompt logprobs:
  // one POST /v1/completions per candidate with echo=true, max_tokens=0.
  kEchoLogprobs,
};

struct HttpBackendOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  ApiStyle api_style = ApiStyle::kNative;
  std::string model;  // forwarded as "model" for kEchoLogprobs
  std::optional<std::string> bearer_token;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds timeout{120};
};

// Wire-protocol client. Transport failures (connection errors, HTTP 5xx and
// 429) are retried with exponential backoff; everything else fails at once.
// Each call opens its own connection, so instances are safe to share across
// worker threads.
class HttpBackend : public ScoringBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string describe() const override;

 protected:
  ScoreResponse do_score(const ScoreRequest& req) override;
  std::string do_generate(const GenerateRequest& req) override;

 private:
  struct HttpReply {
    int status = 0;
    std::string body;
  };
  HttpReply post_with_retry(const std::string& path, const std::string& body);

  ScoreResponse score_native(const ScoreRequest& req);
  ScoreResponse score_echo(const ScoreRequest& req);

  HttpBackendOptions options_;
  std::atomic<std::uint64_t> next_request_id_{1};
};

// Serves the wire protocol from any backend (normally a MockBackend).
class BackendServer {
 public:
  explicit BackendServer(std::shared_ptr<ScoringBackend> backend);
  ~BackendServer();
  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  // Binds to `host`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port = 0);
  // Blocks until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mcqa

#endif  // MCQA_HTTP_BACKEND_HPP_
