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

// Predictions, accuracy and expected calibration error.
//
// Confidence bins are ((m-1)/M, m/M] for m = 1..M, with a confidence of
// exactly 0 assigned to the first bin.

#ifndef MCQA_METRICS_HPP_
#define MCQA_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcqa {

struct ExampleResult {
  std::string example_id;
  std::vector<double> distribution;
  std::size_t predicted_index = 0;
  double confidence = 0.0;
  bool correct = false;
};

// The two quantities calibration looks at.
struct CalibrationPoint {
  double confidence = 0.0;
  bool correct = false;
};

struct ReliabilityBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
  // Empty bins carry no accuracy or confidence.
  std::optional<double> accuracy;
  std::optional<double> mean_confidence;
};

struct ReliabilityBins {
  std::size_t num_bins = 0;
  std::vector<ReliabilityBin> bins;
};

struct EceResult {
  double ece = 0.0;
  ReliabilityBins bins;
};

// Softmax over the candidate logits. Throws kNonFinite on NaN/inf input and
// kInvalidArgument for fewer than two logits.
std::vector<double> normalize_probs(std::span<const double> logits);

struct Prediction {
  std::size_t index = 0;
  double confidence = 0.0;
};

// Argmax; ties go to the lowest index.
Prediction predict(std::span<const double> distribution);

ExampleResult score_example(std::string example_id,
                            std::span<const double> logits,
                            std::size_t gold_index);

double accuracy(std::span<const ExampleResult> results);

std::size_t confidence_bin(double confidence, std::size_t num_bins);

EceResult ece(std::span<const ExampleResult> results, std::size_t num_bins = 10);
EceResult ece(std::span<const CalibrationPoint> points,
              std::size_t num_bins = 10);

// ECE over points[indices[0]], points[indices[1]], ... (indices may repeat);
// the bootstrap's inner loop.
double ece_of_sample(std::span<const CalibrationPoint> points,
                     std::span<const std::size_t> indices,
                     std::size_t num_bins);

ReliabilityBins reliability_bins(std::span<const ExampleResult> results,
                                 std::size_t num_bins = 10);

// CSV with header `bin_low,bin_high,count,accuracy,mean_confidence`; empty
// bins leave the last two fields blank.
std::string reliability_csv(const ReliabilityBins& bins);

std::vector<CalibrationPoint> calibration_points(
    std::span<const ExampleResult> results);

// Aggregate of one (model, dataset, template, strategy) run. Accuracy and ECE
// are stored as fractions; reports scale them by 100.
struct RunResult {
  std::size_t n = 0;
  double accuracy = 0.0;
  double ece = 0.0;
  ReliabilityBins bins;
  std::string strategy;
  std::string template_id;
  std::string model_id;
  std::string dataset_id;
};

RunResult summarize(std::span<const ExampleResult> results,
                    std::size_t num_bins = 10);

}  // namespace mcqa

#endif  // MCQA_METRICS_HPP_
