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

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "mcqa/metrics.hpp"
#include "mcqa/significance.hpp"
#include "mcqa/tokenizer.hpp"

namespace mcqa {
namespace {

const std::string kMarker = "\xE2\x90\xA3";

TokenizerModel bench_vocab() {
  std::vector<std::string> surfaces = {"a", "b", "c", "d", kMarker};
  std::mt19937_64 rng(1);
  while (surfaces.size() < 2000) {
    std::string s;
    const int len = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < len; ++i) s += surfaces[rng() % 5];
    if (std::find(surfaces.begin(), surfaces.end(), s) == surfaces.end()) {
      surfaces.push_back(std::move(s));
    }
  }
  return TokenizerModel(surfaces, kMarker);
}

std::vector<CalibrationPoint> bench_points(std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.25, 1.0);
  std::vector<CalibrationPoint> pts(n);
  for (auto& p : pts) {
    p.confidence = unit(rng);
    p.correct = unit(rng) < p.confidence;
  }
  return pts;
}

std::vector<PairedOutcome> bench_pairs(std::size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.25, 1.0);
  std::vector<PairedOutcome> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].example_id = "q" + std::to_string(100000 + i);
    pairs[i].confidence_a = unit(rng);
    pairs[i].confidence_b = unit(rng);
    pairs[i].correct_a = unit(rng) < pairs[i].confidence_a;
    pairs[i].correct_b = unit(rng) < pairs[i].confidence_b;
  }
  return pairs;
}

void BM_EncodeLongestMatch(benchmark::State& state) {
  const TokenizerModel m = bench_vocab();
  std::mt19937_64 rng(4);
  std::string text;
  for (std::int64_t i = 0; i < state.range(0); ++i) text += "abcd"[rng() % 4];
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_longest_match(m, text));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeLongestMatch)->Arg(1 << 10)->Arg(1 << 16);

void BM_Ece(benchmark::State& state) {
  const auto pts = bench_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ece(std::span<const CalibrationPoint>(pts), 10));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ece)->Arg(1000)->Arg(14042);

void BM_McNemarExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcnemar_from_counts(n / 2 + n / 10, n / 2 - n / 10));
  }
}
BENCHMARK(BM_McNemarExact)->Arg(60)->Arg(2000)->Arg(20000);

void BM_PairedBootstrap(benchmark::State& state) {
  const auto pairs = bench_pairs(1000);
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(paired_bootstrap_ece(pairs, 1000, 7, 10, threads));
  }
}
BENCHMARK(BM_PairedBootstrap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mcqa

BENCHMARK_MAIN();
