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

#include <algorithm>
#include <cmath>

#include "mcqa/error.hpp"
#include "number_format.hpp"

namespace mcqa {

namespace {

struct BinAccumulator {
  std::vector<std::size_t> count;
  std::vector<std::size_t> correct;
  std::vector<double> confidence_sum;

  explicit BinAccumulator(std::size_t m)
      : count(m, 0), correct(m, 0), confidence_sum(m, 0.0) {}

  void add(const CalibrationPoint& p, std::size_t num_bins) {
    const std::size_t b = confidence_bin(p.confidence, num_bins);
    ++count[b];
    if (p.correct) ++correct[b];
    confidence_sum[b] += p.confidence;
  }

  double ece(std::size_t n) const {
    double total = 0.0;
    for (std::size_t b = 0; b < count.size(); ++b) {
      if (count[b] == 0) continue;
      const double c = static_cast<double>(count[b]);
      const double acc = static_cast<double>(correct[b]) / c;
      const double conf = confidence_sum[b] / c;
      total += (c / static_cast<double>(n)) * std::abs(acc - conf);
    }
    return total;
  }
};

void check_bins(std::size_t num_bins) {
  if (num_bins < 1) {
    throw Error(ErrorCode::kInvalidArgument, "number of bins must be >= 1");
  }
}

}  // namespace

std::vector<double> normalize_probs(std::span<const double> logits) {
  if (logits.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least two logits to normalize");
  }
  for (double v : logits) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "non-finite logit");
    }
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

Prediction predict(std::span<const double> distribution) {
  if (distribution.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty distribution");
  }
  double sum = 0.0;
  for (double p : distribution) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "distribution has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "distribution does not sum to 1");
  }
  Prediction best{0, distribution[0]};
  for (std::size_t i = 1; i < distribution.size(); ++i) {
    if (distribution[i] > best.confidence) best = {i, distribution[i]};
  }
  return best;
}

ExampleResult score_example(std::string example_id,
                            std::span<const double> logits,
                            std::size_t gold_index) {
  ExampleResult r;
  r.example_id = std::move(example_id);
  r.distribution = normalize_probs(logits);
  if (gold_index >= r.distribution.size()) {
    throw Error(ErrorCode::kGoldOutOfRange,
                "gold index out of range for '" + r.example_id + "'");
  }
  const Prediction p = predict(r.distribution);
  r.predicted_index = p.index;
  r.confidence = p.confidence;
  r.correct = p.index == gold_index;
  return r;
}

double accuracy(std::span<const ExampleResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyInput, "accuracy of an empty result set");
  }
  const auto correct = std::count_if(results.begin(), results.end(),
                                     [](const auto& r) { return r.correct; });
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

std::size_t confidence_bin(double confidence, std::size_t num_bins) {
  check_bins(num_bins);
  if (!(confidence > 0.0)) return 0;
  if (confidence >= 1.0) return num_bins - 1;
  const double m = static_cast<double>(num_bins);
  auto idx = static_cast<std::size_t>(std::ceil(confidence * m));
  idx = std::clamp<std::size_t>(idx, 1, num_bins) - 1;
  // ceil() of a rounded product can land one bin off near an edge.
  while (idx > 0 && confidence <= static_cast<double>(idx) / m) --idx;
  while (idx + 1 < num_bins && confidence > static_cast<double>(idx + 1) / m)
    ++idx;
  return idx;
}

std::vector<CalibrationPoint> calibration_points(
    std::span<const ExampleResult> results) {
  std::vector<CalibrationPoint> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.confidence, r.correct});
  return out;
}

EceResult ece(std::span<const CalibrationPoint> points, std::size_t num_bins) {
  check_bins(num_bins);
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ECE of an empty result set");
  }
  BinAccumulator acc(num_bins);
  for (const auto& p : points) acc.add(p, num_bins);

  EceResult out;
  out.ece = acc.ece(points.size());
  out.bins.num_bins = num_bins;
  const double m = static_cast<double>(num_bins);
  for (std::size_t b = 0; b < num_bins; ++b) {
    ReliabilityBin bin;
    bin.low = static_cast<double>(b) / m;
    bin.high = static_cast<double>(b + 1) / m;
    bin.count = acc.count[b];
    if (bin.count > 0) {
      const double c = static_cast<double>(bin.count);
      bin.accuracy = static_cast<double>(acc.correct[b]) / c;
      bin.mean_confidence = acc.confidence_sum[b] / c;
    }
    out.bins.bins.push_back(bin);
  }
  return out;
}

EceResult ece(std::span<const ExampleResult> results, std::size_t num_bins) {
  const auto points = calibration_points(results);
  return ece(std::span<const CalibrationPoint>(points), num_bins);
}

double ece_of_sample(std::span<const CalibrationPoint> points,
                     std::span<const std::size_t> indices,
                     std::size_t num_bins) {
  check_bins(num_bins);
  if (indices.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ECE of an empty sample");
  }
  BinAccumulator acc(num_bins);
  for (std::size_t i : indices) acc.add(points[i], num_bins);
  return acc.ece(indices.size());
}

ReliabilityBins reliability_bins(std::span<const ExampleResult> results,
                                 std::size_t num_bins) {
  return ece(results, num_bins).bins;
}

RunResult summarize(std::span<const ExampleResult> results,
                    std::size_t num_bins) {
  RunResult r;
  r.n = results.size();
  r.accuracy = accuracy(results);
  EceResult e = ece(results, num_bins);
  r.ece = e.ece;
  r.bins = std::move(e.bins);
  return r;
}

std::string reliability_csv(const ReliabilityBins& bins) {
  std::string out = "bin_low,bin_high,count,accuracy,mean_confidence\n";
  for (const auto& b : bins.bins) {
    out += detail::shortest(b.low) + "," + detail::shortest(b.high) + "," +
           std::to_string(b.count) + ",";
    if (b.accuracy) out += detail::shortest(*b.accuracy);
    out += ",";
    if (b.mean_confidence) out += detail::shortest(*b.mean_confidence);
    out += "\n";
  }
  return out;
}

}  // namespace mcqa
