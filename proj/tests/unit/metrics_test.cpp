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

#include "mcqa/metrics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.hpp"
#include "test_support.hpp"

namespace mcqa {
namespace {

std::vector<CalibrationPoint> worked_points() {
  return {{0.95, true}, {0.95, false}, {0.65, true}, {0.65, true}};
}

// Random confidences in [0, 1], a quarter of them on bin edges.
std::vector<CalibrationPoint> random_points(std::mt19937_64& rng,
                                            std::size_t n,
                                            std::size_t num_bins) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> edge(0, num_bins);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution on_edge(0.25);
  std::vector<CalibrationPoint> pts(n);
  for (auto& p : pts) {
    p.confidence = on_edge(rng) ? static_cast<double>(edge(rng)) /
                                      static_cast<double>(num_bins)
                                : unit(rng);
    p.correct = coin(rng);
  }
  return pts;
}

std::vector<oracle::Point> to_oracle(const std::vector<CalibrationPoint>& pts) {
  std::vector<oracle::Point> out;
  for (const auto& p : pts) out.push_back({p.confidence, p.correct});
  return out;
}

TEST(NormalizeProbs, SoftmaxOverCandidates) {
  const std::vector<double> logits = {0.0, std::log(3.0)};
  const auto p = normalize_probs(logits);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(NormalizeProbs, LargeLogitsStayFinite) {
  const std::vector<double> logits = {1000.0, 1000.0, 999.0};
  const auto p = normalize_probs(logits);
  double sum = 0.0;
  for (double v : p) {
    EXPECT_TRUE(std::isfinite(v));
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p[0], p[1]);
}

TEST(NormalizeProbs, Errors) {
  const std::vector<double> one = {1.0};
  EXPECT_MCQA_ERROR(normalize_probs(one), ErrorCode::kInvalidArgument);
  const std::vector<double> nan = {1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_MCQA_ERROR(normalize_probs(nan), ErrorCode::kNonFinite);
  const std::vector<double> inf = {1.0, std::numeric_limits<double>::infinity()};
  EXPECT_MCQA_ERROR(normalize_probs(inf), ErrorCode::kNonFinite);
}

TEST(NormalizeProbs, ShiftInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logit(-20.0, 20.0);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  std::uniform_int_distribution<std::size_t> size(2, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(size(rng));
    for (double& v : x) v = logit(rng);
    const double c = shift(rng);
    std::vector<double> y = x;
    for (double& v : y) v += c;
    const auto px = normalize_probs(x);
    const auto py = normalize_probs(y);
    for (std::size_t i = 0; i < px.size(); ++i) {
      EXPECT_NEAR(px[i], py[i], 1e-9);
    }
    EXPECT_EQ(predict(px).index, predict(py).index);
  }
}

TEST(Predict, ArgmaxWithLowestIndexTieBreak) {
  const std::vector<double> d = {0.1, 0.4, 0.4, 0.1};
  const Prediction p = predict(d);
  EXPECT_EQ(p.index, 1u);
  EXPECT_DOUBLE_EQ(p.confidence, 0.4);
  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(predict(uniform).index, 0u);
}

TEST(Predict, RejectsNonDistributions) {
  const std::vector<double> bad_sum = {0.5, 0.6};
  EXPECT_MCQA_ERROR(predict(bad_sum), ErrorCode::kInvalidArgument);
  const std::vector<double> negative = {1.5, -0.5};
  EXPECT_MCQA_ERROR(predict(negative), ErrorCode::kInvalidArgument);
}

TEST(ScoreExample, GoldOutOfRange) {
  const std::vector<double> logits = {1.0, 2.0};
  EXPECT_MCQA_ERROR(score_example("q", logits, 2), ErrorCode::kGoldOutOfRange);
  const ExampleResult r = score_example("q", logits, 1);
  EXPECT_TRUE(r.correct);
  EXPECT_EQ(r.predicted_index, 1u);
}

TEST(ConfidenceBin, RightClosedIntervals) {
  EXPECT_EQ(confidence_bin(0.0, 10), 0u);
  EXPECT_EQ(confidence_bin(0.1, 10), 0u);
  EXPECT_EQ(confidence_bin(std::nextafter(0.1, 1.0), 10), 1u);
  EXPECT_EQ(confidence_bin(0.3, 10), 2u);
  EXPECT_EQ(confidence_bin(0.7, 10), 6u);
  EXPECT_EQ(confidence_bin(0.95, 10), 9u);
  EXPECT_EQ(confidence_bin(1.0, 10), 9u);
  EXPECT_EQ(confidence_bin(0.5, 1), 0u);
  EXPECT_MCQA_ERROR(confidence_bin(0.5, 0), ErrorCode::kInvalidArgument);
}

TEST(Ece, WorkedExampleIsPointFour) {
  const auto pts = worked_points();
  const EceResult r = ece(std::span<const CalibrationPoint>(pts), 10);
  EXPECT_NEAR(r.ece, 0.40, 1e-12);
  // 0.95 and 0.65 are not binary fractions; the exact ECE of the stored
  // inputs is 0.4 - 2^-54, which rounds to the double just below 0.4.
  EXPECT_EQ(r.ece, std::nextafter(0.40, 0.0));
}

TEST(Ece, BinaryExactInputsGiveExactResult) {
  const std::vector<CalibrationPoint> pts = {
      {0.9375, true}, {0.9375, false}, {0.625, true}, {0.625, true}};
  const EceResult r = ece(std::span<const CalibrationPoint>(pts), 10);
  EXPECT_EQ(r.ece, 0.21875 + 0.1875);
}

TEST(ReliabilityBins, WorkedExampleOccupiedBins) {
  const auto pts = worked_points();
  const EceResult r = ece(std::span<const CalibrationPoint>(pts), 10);
  ASSERT_EQ(r.bins.bins.size(), 10u);
  std::size_t occupied = 0;
  std::size_t total = 0;
  for (const auto& b : r.bins.bins) {
    total += b.count;
    if (b.count == 0) {
      EXPECT_FALSE(b.accuracy.has_value());
      EXPECT_FALSE(b.mean_confidence.has_value());
      continue;
    }
    ++occupied;
  }
  EXPECT_EQ(occupied, 2u);
  EXPECT_EQ(total, 4u);
  const ReliabilityBin& high = r.bins.bins[9];
  EXPECT_EQ(high.count, 2u);
  EXPECT_DOUBLE_EQ(*high.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(*high.mean_confidence, 0.95);
  const ReliabilityBin& mid = r.bins.bins[6];
  EXPECT_EQ(mid.count, 2u);
  EXPECT_DOUBLE_EQ(*mid.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*mid.mean_confidence, 0.65);
}

TEST(Ece, MatchesDirectSummationOracle) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> size(1, 1000);
  const std::size_t bin_choices[] = {1, 5, 10};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = bin_choices[trial % 3];
    const auto pts = random_points(rng, size(rng), m);
    const double got = ece(std::span<const CalibrationPoint>(pts), m).ece;
    EXPECT_NEAR(got, oracle::ece(to_oracle(pts), m), 1e-12) << "trial " << trial;
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Ece, WeightedBinIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 300, 10);
    const EceResult r = ece(std::span<const CalibrationPoint>(pts), 10);
    double recomputed = 0.0;
    std::size_t total = 0;
    for (const auto& b : r.bins.bins) {
      total += b.count;
      if (b.count == 0) continue;
      recomputed += static_cast<double>(b.count) / 300.0 *
                    std::abs(*b.accuracy - *b.mean_confidence);
    }
    EXPECT_EQ(total, 300u);
    EXPECT_NEAR(recomputed, r.ece, 1e-12);
  }
}

TEST(Ece, SingleBinIsAccuracyGap) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 97, 1);
    const EceResult r = ece(std::span<const CalibrationPoint>(pts), 1);
    double hits = 0.0;
    double conf = 0.0;
    for (const auto& p : pts) {
      hits += p.correct ? 1.0 : 0.0;
      conf += p.confidence;
    }
    EXPECT_EQ(r.ece, std::abs(hits / 97.0 - conf / 97.0));
  }
}

TEST(Ece, SampleMatchesExpandedInput) {
  const auto pts = worked_points();
  const std::vector<std::size_t> idx = {0, 0, 2, 3, 1};
  std::vector<CalibrationPoint> expanded;
  for (std::size_t i : idx) expanded.push_back(pts[i]);
  EXPECT_EQ(ece_of_sample(pts, idx, 10),
            ece(std::span<const CalibrationPoint>(expanded), 10).ece);
}

TEST(Ece, Errors) {
  const std::vector<CalibrationPoint> none;
  EXPECT_MCQA_ERROR(ece(std::span<const CalibrationPoint>(none), 10),
                    ErrorCode::kEmptyInput);
  const auto pts = worked_points();
  EXPECT_MCQA_ERROR(ece(std::span<const CalibrationPoint>(pts), 0),
                    ErrorCode::kInvalidArgument);
}

TEST(Summarize, AccuracyAndEce) {
  std::vector<ExampleResult> results;
  const std::vector<double> sure_a = {5.0, 0.0};
  const std::vector<double> sure_b = {0.0, 5.0};
  results.push_back(score_example("a", sure_a, 0));
  results.push_back(score_example("b", sure_b, 0));
  const RunResult r = summarize(results, 10);
  EXPECT_EQ(r.n, 2u);
  EXPECT_EQ(r.accuracy, 0.5);
  const auto pts = calibration_points(results);
  EXPECT_NEAR(r.ece, oracle::ece(to_oracle(std::vector<CalibrationPoint>(
                                     pts.begin(), pts.end())),
                                 10),
              1e-15);
}

TEST(ReliabilityCsv, EmptyBinsLeaveFieldsBlank) {
  const auto pts = worked_points();
  const EceResult r = ece(std::span<const CalibrationPoint>(pts), 10);
  const std::string csv = reliability_csv(r.bins);
  EXPECT_THAT(csv, ::testing::StartsWith(
                       "bin_low,bin_high,count,accuracy,mean_confidence\n"
                       "0,0.1,0,,\n"));
  EXPECT_THAT(csv, ::testing::HasSubstr("0.6,0.7,2,1,0.65\n"));
  EXPECT_THAT(csv, ::testing::HasSubstr("0.9,1,2,0.5,0.95\n"));
}

}  // namespace
}  // namespace mcqa
