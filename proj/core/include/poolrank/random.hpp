// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace poolrank {

using Rng = std::mt19937_64;

//! SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Purpose tags for derived random streams. A stream is identified by
//! (master seed, purpose, index); index is the split, fold, tree or
//! resample number.
enum class Stream : std::uint64_t {
  kSplit = 1,
  kFolds = 2,
  kForest = 3,
  kTree = 4,
  kBootstrap = 5,
  kSynth = 6,
  kTuning = 7,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream purpose,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(purpose))) + index);
}

inline Rng make_rng(std::uint64_t master, Stream purpose, std::uint64_t index = 0) {
  return Rng(derive_seed(master, purpose, index));
}

//! Uniform double in [0, 1) from 53 random bits. Unlike
//! std::uniform_real_distribution its output is fixed by the standard
//! engine, so generated files are identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

//! Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

//! Standard normal variate (Box-Muller, no caching).
double standard_normal(Rng& rng);

//! Poisson variate (inversion for small means, normal approximation above 500).
std::uint64_t poisson(Rng& rng, double mean);

//! In-place Fisher-Yates shuffle.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace poolrank
