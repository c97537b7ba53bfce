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

// Portable seeded randomness.
//
// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so every seeded draw in the library goes through these helpers to keep
// results identical across standard libraries.

#ifndef MCQA_RNG_HPP_
#define MCQA_RNG_HPP_

#include <cstdint>
#include <random>

namespace mcqa {

// SplitMix64 step: maps a 64-bit state to a well-mixed output.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream keyed by (seed, stream). Stream `k` can be generated
// independently of streams 0..k-1, so per-iteration work can run in parallel
// and still match the sequential order exactly.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(splitmix64_mix(seed ^ splitmix64_mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

// Uniform integer in [0, bound) by rejection sampling; `bound` > 0.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0},
                "uniform_below needs a full-range 64-bit engine");
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = engine();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace mcqa

#endif  // MCQA_RNG_HPP_
