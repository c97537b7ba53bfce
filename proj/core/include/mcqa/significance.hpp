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

// Paired significance tests between the two tokenization strategies.
//
// Side A is always the letter-only strategy ("X"), side B the space-letter
// strategy (" X").

#ifndef MCQA_SIGNIFICANCE_HPP_
#define MCQA_SIGNIFICANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcqa {

inline constexpr double kSignificanceLevel = 0.05;

inline bool is_significant(double p_value) {
  return p_value < kSignificanceLevel;
}

struct PairedOutcome {
  std::string example_id;
  bool correct_a = false;
  bool correct_b = false;
  double confidence_a = 0.0;
  double confidence_b = 0.0;
  std::size_t predicted_a = 0;
  std::size_t predicted_b = 0;
};

enum class Sidedness { kOneSidedBGreater, kTwoSided };
enum class McNemarMethod { kExactBinomial };

std::string_view to_string(Sidedness s);
std::string_view to_string(McNemarMethod m);

struct McNemarResult {
  std::size_t b = 0;  // correct only under B
  std::size_t c = 0;  // correct only under A
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::kOneSidedBGreater;
  McNemarMethod method = McNemarMethod::kExactBinomial;

  bool operator==(const McNemarResult&) const = default;
};

// P(X >= k) for X ~ Binomial(n, 1/2), correctly rounded to double.
double binomial_upper_tail_half(std::uint64_t n, std::uint64_t k);

// Exact McNemar test on discordant counts. One-sided: P(X >= b) with
// n = b + c; two-sided: min(1, 2 * smaller tail). b = c = 0 gives p = 1.
McNemarResult mcnemar_from_counts(
    std::size_t b, std::size_t c,
    Sidedness sidedness = Sidedness::kOneSidedBGreater);

McNemarResult mcnemar(std::span<const PairedOutcome> pairs,
                      Sidedness sidedness = Sidedness::kOneSidedBGreater);

struct BootstrapResult {
  double observed_delta = 0.0;  // ECE_A - ECE_B
  double p_value = 1.0;         // fraction of resampled deltas <= 0
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::size_t num_bins = 10;
  double ci_low = 0.0;
  double ci_high = 0.0;

  bool operator==(const BootstrapResult&) const = default;
};

inline constexpr std::size_t kDefaultBootstrapIterations = 10'000;

// Linear-interpolation percentile (q in [0, 1]) of an ascending sequence.
double percentile_sorted(std::span<const double> sorted, double q);

// Paired bootstrap on the ECE difference. Pairs are sorted by example id
// first, so input order never matters. Iteration i draws its resample from
// CounterRng(seed, i); `parallelism` > 1 splits iterations across threads
// without changing the result.
BootstrapResult paired_bootstrap_ece(
    std::span<const PairedOutcome> pairs,
    std::size_t iterations = kDefaultBootstrapIterations,
    std::uint64_t seed = 0, std::size_t num_bins = 10,
    std::size_t parallelism = 1);

struct DeltaAggregate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

// Mean of per-model deltas with a percentile-bootstrap 95% interval.
DeltaAggregate aggregate_deltas(
    std::span<const double> deltas,
    std::size_t iterations = kDefaultBootstrapIterations,
    std::uint64_t seed = 0);

// Sorts by example id and checks ids are unique. Throws kPairingMismatch.
std::vector<PairedOutcome> canonical_order(std::span<const PairedOutcome> pairs);

}  // namespace mcqa

#endif  // MCQA_SIGNIFICANCE_HPP_
