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

#include "mcqa/http_backend.hpp"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mcqa/error.hpp"

namespace mcqa {

namespace {

using json = nlohmann::json;

constexpr const char* kJson = "application/json";

bool is_transient_status(int status) {
  return status == 429 || (status >= 500 && status <= 599);
}

json parse_body(const std::string& body, const std::string& what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse,
                what + ": response is not JSON: " + e.what());
  }
}

std::string error_message(const std::string& body) {
  try {
    const json j = json::parse(body);
    if (j.contains("error")) {
      const json& e = j.at("error");
      if (e.is_string()) return e.get<std::string>();
      if (e.is_object()) return e.value("message", e.dump());
    }
  } catch (const json::exception&) {
  }
  return body;
}

void check_status(int status, const std::string& body,
                  const std::string& what) {
  if (status == 200) return;
  if (status == 422) {
    throw Error(ErrorCode::kCandidateRejected,
                what + ": server rejected a candidate: " + error_message(body));
  }
  throw Error(ErrorCode::kProtocolViolation,
              what + ": HTTP " + std::to_string(status) + ": " +
                  error_message(body));
}

void check_request_id(const json& body, std::uint64_t expected,
                      const std::string& what) {
  if (!body.contains("request_id")) return;
  const json& id = body.at("request_id");
  if (!id.is_number_unsigned() || id.get<std::uint64_t>() != expected) {
    throw Error(ErrorCode::kMalformedResponse,
                what + ": response correlation id does not match request");
  }
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw Error(ErrorCode::kConfig, "endpoint backend needs a base URL");
  }
  if (options_.max_retries < 0) {
    throw Error(ErrorCode::kConfig, "max_retries must be >= 0");
  }
}

std::string HttpBackend::describe() const {
  return std::string(options_.api_style == ApiStyle::kNative
                         ? "endpoint:native:"
                         : "endpoint:echo-logprobs:") +
         options_.base_url;
}

HttpBackend::HttpReply HttpBackend::post_with_retry(const std::string& path,
                                                    const std::string& body) {
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    if (options_.bearer_token) {
      client.set_bearer_token_auth(*options_.bearer_token);
    }
    auto res = client.Post(path, body, kJson);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (is_transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    return {res->status, res->body};
  }
  throw Error(ErrorCode::kTransport,
              "POST " + options_.base_url + path + " failed after " +
                  std::to_string(options_.max_retries + 1) +
                  " attempts: " + last_error);
}

ScoreResponse HttpBackend::do_score(const ScoreRequest& req) {
  return options_.api_style == ApiStyle::kNative ? score_native(req)
                                                 : score_echo(req);
}

ScoreResponse HttpBackend::score_native(const ScoreRequest& req) {
  const std::uint64_t id = next_request_id_++;
  json body = {{"prompt", req.prompt},
               {"candidates", req.candidates},
               {"request_id", id}};
  if (!req.prompt_segments.empty()) body["prompt_segments"] = req.prompt_segments;
  const HttpReply reply = post_with_retry("/v1/score", body.dump());
  check_status(reply.status, reply.body, "/v1/score");
  const json doc = parse_body(reply.body, "/v1/score");
  check_request_id(doc, id, "/v1/score");
  if (!doc.contains("logits") || !doc.at("logits").is_array()) {
    throw Error(ErrorCode::kMalformedResponse,
                "/v1/score: response has no 'logits' array");
  }
  ScoreResponse resp;
  for (const json& v : doc.at("logits")) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kMalformedResponse,
                  "/v1/score: non-numeric logit");
    }
    resp.logits.push_back(v.get<double>());
  }
  return resp;
}

// Each candidate is appended to the prompt and the echoed logprob of the last
// prompt token is read back. Logprobs differ from logits by the same log
// partition constant for a fixed prompt, so softmax over candidates is
// unchanged.
ScoreResponse HttpBackend::score_echo(const ScoreRequest& req) {
  ScoreResponse resp;
  for (const std::string& candidate : req.candidates) {
    json body = {{"model", options_.model},
                 {"prompt", req.prompt + candidate},
                 {"max_tokens", 0},
                 {"echo", true},
                 {"logprobs", 0},
                 {"temperature", 0}};
    const HttpReply reply = post_with_retry("/v1/completions", body.dump());
    check_status(reply.status, reply.body, "/v1/completions");
    const json doc = parse_body(reply.body, "/v1/completions");
    try {
      const json& lp = doc.at("choices").at(0).at("logprobs");
      const auto& tokens = lp.at("tokens");
      const auto& logprobs = lp.at("token_logprobs");
      if (tokens.empty() || tokens.size() != logprobs.size()) {
        throw Error(ErrorCode::kMalformedResponse,
                    "/v1/completions: token/logprob arrays misaligned");
      }
      if (tokens.back().get<std::string>() != candidate) {
        throw Error(ErrorCode::kCandidateRejected,
                    "/v1/completions: candidate '" + candidate +
                        "' is not a single trailing token (got '" +
                        tokens.back().get<std::string>() + "')");
      }
      if (!logprobs.back().is_number()) {
        throw Error(ErrorCode::kMalformedResponse,
                    "/v1/completions: missing logprob for candidate");
      }
      resp.logits.push_back(logprobs.back().get<double>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse,
                  std::string("/v1/completions: ") + e.what());
    }
  }
  return resp;
}

std::string HttpBackend::do_generate(const GenerateRequest& req) {
  const bool native = options_.api_style == ApiStyle::kNative;
  const std::string path = native ? "/v1/generate" : "/v1/completions";
  const std::uint64_t id = next_request_id_++;
  json body = {{"prompt", req.prompt},
               {"max_tokens", req.max_tokens},
               {"stop", req.stop}};
  if (native) {
    body["request_id"] = id;
  } else {
    body["model"] = options_.model;
    body["temperature"] = 0;
  }
  const HttpReply reply = post_with_retry(path, body.dump());
  check_status(reply.status, reply.body, path);
  const json doc = parse_body(reply.body, path);
  try {
    if (native) {
      check_request_id(doc, id, path);
      if (doc.value("sampling", false)) {
        throw Error(ErrorCode::kProtocolViolation,
                    path + ": server reports sampling enabled; greedy "
                           "decoding is required");
      }
      return doc.at("text").get<std::string>();
    }
    return doc.at("choices").at(0).at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, path + ": " + e.what());
  }
}

struct BackendServer::Impl {
  std::shared_ptr<ScoringBackend> backend;
  httplib::Server server;
};

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCandidateRejected: return 422;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedResponse: return 400;
    default: return 500;
  }
}

void reply_error(httplib::Response& res, int status, std::string_view code,
                 const std::string& message) {
  res.status = status;
  json body = {{"error", {{"code", code}, {"message", message}}}};
  res.set_content(body.dump(), kJson);
}

}  // namespace

BackendServer::BackendServer(std::shared_ptr<ScoringBackend> backend)
    : impl_(std::make_unique<Impl>()) {
  impl_->backend = std::move(backend);
  auto* backend_ptr = impl_->backend.get();

  impl_->server.Post("/v1/score", [backend_ptr](const httplib::Request& req,
                                                httplib::Response& res) {
    try {
      const json in = json::parse(req.body);
      ScoreRequest sr;
      sr.prompt = in.at("prompt").get<std::string>();
      sr.candidates = in.at("candidates").get<std::vector<std::string>>();
      if (in.contains("prompt_segments")) {
        sr.prompt_segments =
            in.at("prompt_segments").get<std::vector<std::string>>();
      }
      const ScoreResponse out = backend_ptr->score_candidates(sr);
      json body = {{"logits", out.logits}};
      if (in.contains("request_id")) body["request_id"] = in.at("request_id");
      res.set_content(body.dump(), kJson);
    } catch (const json::exception& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
      reply_error(res, status_for(e.code()), to_string(e.code()), e.what());
    }
  });

  impl_->server.Post("/v1/generate", [backend_ptr](const httplib::Request& req,
                                                   httplib::Response& res) {
    try {
      const json in = json::parse(req.body);
      const std::string text = backend_ptr->generate_greedy(
          in.at("prompt").get<std::string>(), in.at("max_tokens").get<int>(),
          in.value("stop", std::vector<std::string>{}));
      json body = {{"text", text}, {"sampling", false}};
      if (in.contains("request_id")) body["request_id"] = in.at("request_id");
      res.set_content(body.dump(), kJson);
    } catch (const json::exception& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
      reply_error(res, status_for(e.code()), to_string(e.code()), e.what());
    }
  });
}

BackendServer::~BackendServer() { stop(); }

int BackendServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) {
      throw Error(ErrorCode::kTransport, "cannot bind to " + host);
    }
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kTransport,
                "cannot bind to " + host + ":" + std::to_string(port));
  }
  return port;
}

void BackendServer::serve() { impl_->server.listen_after_bind(); }

void BackendServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace mcqa
