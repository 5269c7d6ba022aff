// Copyright 2026 The Corpus Forge Authors
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

#ifndef FORGE_RNG_H_
#define FORGE_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace forge {

// Seed for every stochastic step. Any fixed value gives byte-identical
// outputs; nothing in the toolkit reads entropy from the environment.
struct Seed {
  uint64_t value = 0;
};

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// mt19937_64 output is fixed by the standard, but the std distributions are
// not, so the draws below are written out by hand.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(SplitMix64(seed.value)) {}

  // Independent stream keyed by (seed, stream). Used for per-sentence and
  // per-language randomness so results do not depend on visiting order.
  static Rng Derive(Seed seed, uint64_t stream) {
    return Rng(Seed{SplitMix64(seed.value ^ SplitMix64(stream + 1))});
  }

  uint64_t Next() { return engine_(); }

  // Uniform in [0, bound). Rejection sampling, so no modulo bias.
  uint64_t UniformIndex(uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, 1) with 53 random bits.
  double UniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(UniformIndex(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace forge

#endif  // FORGE_RNG_H_
