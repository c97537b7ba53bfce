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

#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcqa/metrics.hpp"
#include "mcqa/significance.hpp"
#include "mcqa/tokenizer.hpp"
#include "oracles.hpp"

namespace mcqa::cli {
namespace {

struct Check {
  const char* name;
  std::function<bool()> run;
};

bool ece_matches_oracle() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(1, 1000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const std::size_t bins[] = {1, 5, 10};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = bins[trial % 3];
    std::vector<CalibrationPoint> pts(size(rng));
    std::vector<oracle::Point> ops;
    for (auto& p : pts) {
      p.confidence = unit(rng);
      p.correct = coin(rng);
      ops.push_back({p.confidence, p.correct});
    }
    const double got = ece(std::span<const CalibrationPoint>(pts), m).ece;
    if (std::abs(got - oracle::ece(ops, m)) > 1e-12) return false;
  }
  return true;
}

bool mcnemar_matches_pascal() {
  const auto t = oracle::pascal(60);
  for (std::size_t n = 1; n <= 60; ++n) {
    for (std::size_t b = 0; b <= n; ++b) {
      if (mcnemar_from_counts(b, n - b).p_value != oracle::upper_tail(t, n, b)) {
        return false;
      }
    }
  }
  return mcnemar_from_counts(10, 2).p_value == 79.0 / 4096.0;
}

std::vector<PairedOutcome> random_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> conf(0.25, 1.0);
  std::bernoulli_distribution coin(0.6);
  std::vector<PairedOutcome> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].example_id = "e" + std::to_string(1000 + i);
    pairs[i].confidence_a = conf(rng);
    pairs[i].confidence_b = conf(rng);
    pairs[i].correct_a = coin(rng);
    pairs[i].correct_b = coin(rng);
  }
  return pairs;
}

bool bootstrap_matches_oracle() {
  const auto pairs = random_pairs(50, 5);
  std::vector<oracle::Pair> ops;
  for (const auto& p : pairs) {
    ops.push_back({p.confidence_a, p.correct_a, p.confidence_b, p.correct_b});
  }
  const BootstrapResult got = paired_bootstrap_ece(pairs, 500, 17);
  const oracle::Bootstrap want = oracle::paired_bootstrap(ops, 500, 17, 10);
  return std::abs(got.observed_delta - want.observed) <= 1e-12 &&
         got.p_value == want.p && std::abs(got.ci_low - want.lo) <= 1e-12 &&
         std::abs(got.ci_high - want.hi) <= 1e-12;
}

bool bootstrap_reproducible() {
  auto pairs = random_pairs(120, 3);
  const BootstrapResult base = paired_bootstrap_ece(pairs, 2000, 99);
  std::mt19937_64 rng(4);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  return paired_bootstrap_ece(pairs, 2000, 99) == base &&
         paired_bootstrap_ece(pairs, 2000, 99, 10, 4) == base;
}

bool softmax_shift_invariant() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> logit(-30.0, 30.0);
  std::uniform_real_distribution<double> shift(-500.0, 500.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(2 + trial % 9);
    for (double& v : x) v = logit(rng);
    std::vector<double> y = x;
    const double c = shift(rng);
    for (double& v : y) v += c;
    const auto px = normalize_probs(x);
    const auto py = normalize_probs(y);
    for (std::size_t i = 0; i < px.size(); ++i) {
      if (std::abs(px[i] - py[i]) > 1e-9) return false;
    }
    if (predict(px).index != predict(py).index) return false;
  }
  return true;
}

bool tokenizer_round_trips() {
  const std::string marker = "\xE2\x90\xA3";
  const std::vector<std::string> alphabet = {"a", "b", "c", marker, "\xC3\xA9"};
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> surfaces = alphabet;
    for (int k = 0; k < 15; ++k) {
      std::string s;
      const int len = 2 + static_cast<int>(rng() % 4);
      for (int c = 0; c < len; ++c) s += alphabet[rng() % alphabet.size()];
      if (std::find(surfaces.begin(), surfaces.end(), s) == surfaces.end()) {
        surfaces.push_back(s);
      }
    }
    const TokenizerModel m(surfaces, marker);
    std::string text;
    const int len = static_cast<int>(rng() % 40);
    for (int c = 0; c < len; ++c) text += alphabet[rng() % alphabet.size()];
    if (m.decode(encode_longest_match(m, text)) != text) return false;
  }
  return true;
}

bool similarity_symmetric() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10, dim = 2 + trial % 7;
    std::vector<std::string> surfaces;
    EmbeddingMatrix e{n, dim, {}};
    for (std::size_t i = 0; i < n; ++i) {
      surfaces.push_back("t" + std::to_string(i));
      for (std::size_t d = 0; d < dim; ++d) e.values.push_back(normal(rng));
    }
    const TokenizerModel m(surfaces, " ", e);
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(static_cast<TokenId>(i));
    const SimilarityMatrix s = embedding_similarity(m, ids);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(s[i][i] - 1.0) > 1e-12) return false;
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(s[i][j] - s[j][i]) > 1e-12) return false;
      }
    }
  }
  const TokenizerModel pair({"x", "y"}, " ",
                            EmbeddingMatrix{2, 2, {1.0, 0.0, 1.0, 1.0}});
  const std::vector<TokenId> ids = {0, 1};
  return std::abs(embedding_similarity(pair, ids)[0][1] - 1.0 / std::sqrt(2.0)) <=
         1e-9;
}

}  // namespace

bool run_selfcheck(std::ostream& out) {
  const Check checks[] = {
      {"ECE equals direct summation (200 instances)", ece_matches_oracle},
      {"McNemar tail equals Pascal's triangle (b + c <= 60)",
       mcnemar_matches_pascal},
      {"paired bootstrap equals reference loop", bootstrap_matches_oracle},
      {"paired bootstrap is order and thread independent",
       bootstrap_reproducible},
      {"softmax and argmax are shift invariant", softmax_shift_invariant},
      {"longest-match encode/decode round trips", tokenizer_round_trips},
      {"embedding similarity is symmetric with unit diagonal",
       similarity_symmetric},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      out << "[FAIL] " << c.name << ": " << e.what() << "\n";
      all = false;
      continue;
    }
    out << (ok ? "[PASS] " : "[FAIL] ") << c.name << "\n";
    all = all && ok;
  }
  return all;
}

}  // namespace mcqa::cli
