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

#include "mcqa/significance.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "mcqa/error.hpp"
#include "mcqa/metrics.hpp"
#include "mcqa/rng.hpp"

namespace mcqa {

namespace {

// Mean computed as x0 + sum(x_i - x0) / n, so a constant sequence yields its
// value exactly.
double shifted_mean(std::span<const double> xs) {
  const double base = xs.front();
  double acc = 0.0;
  for (double x : xs) acc += x - base;
  return base + acc / static_cast<double>(xs.size());
}

template <typename Fn>
void run_iterations(std::size_t iterations, std::size_t parallelism, Fn fn) {
  parallelism = std::clamp<std::size_t>(parallelism, 1, iterations);
  if (parallelism == 1) {
    for (std::size_t i = 0; i < iterations; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(parallelism);
  const std::size_t chunk = (iterations + parallelism - 1) / parallelism;
  for (std::size_t w = 0; w < parallelism; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(iterations, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace

std::string_view to_string(Sidedness s) {
  return s == Sidedness::kTwoSided ? "two_sided" : "one_sided_b_greater";
}

std::string_view to_string(McNemarMethod) { return "exact_binomial"; }

double binomial_upper_tail_half(std::uint64_t n, std::uint64_t k) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;

  // sum_{j=k..n} C(n, j), exactly. C(n, j+1) = C(n, j) * (n - j) / (j + 1).
  mpz_t term, sum;
  mpz_init(term);
  mpz_init(sum);
  mpz_bin_uiui(term, n, k);
  for (std::uint64_t j = k; j <= n; ++j) {
    mpz_add(sum, sum, term);
    if (j < n) {
      mpz_mul_ui(term, term, n - j);
      mpz_divexact_ui(term, term, j + 1);
    }
  }

  // sum * 2^-n with a single rounding to double.
  const auto bits = static_cast<mpfr_prec_t>(
      std::max<std::size_t>(mpz_sizeinbase(sum, 2), MPFR_PREC_MIN));
  mpfr_t x;
  mpfr_init2(x, bits);
  mpfr_set_z(x, sum, MPFR_RNDN);
  mpfr_mul_2si(x, x, -static_cast<long>(n), MPFR_RNDN);
  const double p = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  mpz_clear(sum);
  mpz_clear(term);
  return p;
}

McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c,
                                  Sidedness sidedness) {
  McNemarResult r;
  r.b = b;
  r.c = c;
  r.sidedness = sidedness;
  const std::uint64_t n = b + c;
  if (n == 0) {
    r.p_value = 1.0;
    return r;
  }
  double p = 0.0;
  if (sidedness == Sidedness::kOneSidedBGreater) {
    p = binomial_upper_tail_half(n, b);
  } else {
    // P(X <= b) == P(X >= c) by symmetry of Binomial(n, 1/2).
    const double smaller =
        std::min(binomial_upper_tail_half(n, b), binomial_upper_tail_half(n, c));
    p = std::min(1.0, 2.0 * smaller);
  }
  // Keep the p-value strictly positive when the exact tail underflows.
  r.p_value = std::max(p, std::numeric_limits<double>::denorm_min());
  return r;
}

McNemarResult mcnemar(std::span<const PairedOutcome> pairs,
                      Sidedness sidedness) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "McNemar test on an empty pairing");
  }
  std::size_t b = 0;
  std::size_t c = 0;
  for (const auto& p : pairs) {
    if (p.correct_b && !p.correct_a) ++b;
    if (p.correct_a && !p.correct_b) ++c;
  }
  return mcnemar_from_counts(b, c, sidedness);
}

std::vector<PairedOutcome> canonical_order(
    std::span<const PairedOutcome> pairs) {
  std::vector<PairedOutcome> out(pairs.begin(), pairs.end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.example_id < y.example_id;
  });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].example_id == out[i - 1].example_id) {
      throw Error(ErrorCode::kPairingMismatch,
                  "example id '" + out[i].example_id +
                      "' appears more than once in the pairing");
    }
  }
  return out;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kEmptyInput, "percentile of an empty sequence");
  }
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BootstrapResult paired_bootstrap_ece(std::span<const PairedOutcome> pairs,
                                     std::size_t iterations,
                                     std::uint64_t seed, std::size_t num_bins,
                                     std::size_t parallelism) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "bootstrap on an empty pairing");
  }
  if (iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "bootstrap needs at least one iteration");
  }
  if (num_bins < 1) {
    throw Error(ErrorCode::kInvalidArgument, "number of bins must be >= 1");
  }
  const auto ordered = canonical_order(pairs);
  const std::size_t n = ordered.size();
  std::vector<CalibrationPoint> side_a(n);
  std::vector<CalibrationPoint> side_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    side_a[i] = {ordered[i].confidence_a, ordered[i].correct_a};
    side_b[i] = {ordered[i].confidence_b, ordered[i].correct_b};
  }

  BootstrapResult r;
  r.iterations = iterations;
  r.seed = seed;
  r.num_bins = num_bins;
  r.observed_delta = ece(std::span<const CalibrationPoint>(side_a), num_bins).ece -
                     ece(std::span<const CalibrationPoint>(side_b), num_bins).ece;

  std::vector<double> deltas(iterations);
  run_iterations(iterations, parallelism, [&](std::size_t it) {
    CounterRng rng(seed, it);
    std::vector<std::size_t> idx(n);
    for (auto& v : idx) v = static_cast<std::size_t>(uniform_below(rng, n));
    deltas[it] = ece_of_sample(side_a, idx, num_bins) -
                 ece_of_sample(side_b, idx, num_bins);
  });

  const auto at_most_zero =
      std::count_if(deltas.begin(), deltas.end(), [](double d) { return d <= 0.0; });
  r.p_value = static_cast<double>(at_most_zero) / static_cast<double>(iterations);
  std::sort(deltas.begin(), deltas.end());
  r.ci_low = percentile_sorted(deltas, 0.025);
  r.ci_high = percentile_sorted(deltas, 0.975);
  return r;
}

DeltaAggregate aggregate_deltas(std::span<const double> deltas,
                                std::size_t iterations, std::uint64_t seed) {
  if (deltas.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "aggregating deltas needs at least two values");
  }
  if (iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "bootstrap needs at least one iteration");
  }
  for (double d : deltas) {
    if (!std::isfinite(d)) throw Error(ErrorCode::kNonFinite, "non-finite delta");
  }
  DeltaAggregate out;
  out.iterations = iterations;
  out.seed = seed;
  out.mean = shifted_mean(deltas);

  const std::size_t n = deltas.size();
  std::vector<double> means(iterations);
  std::vector<double> sample(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    CounterRng rng(seed, it);
    for (auto& v : sample) v = deltas[uniform_below(rng, n)];
    means[it] = shifted_mean(sample);
  }
  std::sort(means.begin(), means.end());
  out.ci_low = percentile_sorted(means, 0.025);
  out.ci_high = percentile_sorted(means, 0.975);
  return out;
}

}  // namespace mcqa
