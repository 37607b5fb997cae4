//
// Copyright 2026 The purdest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PURDEST_RANDOM_HPP_
#define PURDEST_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace purdest {

// Every randomized component draws from this engine. The 64-bit Mersenne
// Twister output stream is fully specified by the standard, so a seed pins
// the bit stream across platforms.
using Rng = std::mt19937_64;

// splitmix64 finalizer. Used to derive independent per-trial and
// per-purpose seeds from a single master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for stream `index` under `master`. Distinct indices give unrelated
// streams; the mapping is stable and documented so ports can reproduce it.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) with 53 random bits.
template <class URBG>
double uniform01(URBG& rng) {
  return static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) *
         0x1.0p-53;
}

// Uniform double in the open interval (0, 1).
template <class URBG>
double uniform_open01(URBG& rng) {
  return (static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) + 0.5) *
         0x1.0p-53;
}

}  // namespace purdest

#endif  // PURDEST_RANDOM_HPP_
