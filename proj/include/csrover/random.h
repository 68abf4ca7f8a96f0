// Copyright 2026 The csrover Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Portable random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are written out here
// because the standard library ones are implementation-defined.
//
// Stream splitting: substream k of seed s is an engine seeded with
// SplitMix64(s + (k + 1) * 0x9E3779B97F4A7C15).

#ifndef CSROVER_RANDOM_H_
#define CSROVER_RANDOM_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace csrover {

// The SplitMix64 output function.
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t SubstreamSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

// FNV-1a, used to derive per-name seeds.
constexpr std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double Uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); n must be positive. Rejection sampling keeps
  // it exactly uniform.
  std::uint64_t Index(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Beta(a, b) for positive integers: the a-th smallest of a + b - 1
  // uniforms.
  double BetaInt(int a, int b) {
    std::vector<double> u(static_cast<std::size_t>(a + b - 1));
    for (double& x : u) x = Uniform();
    std::nth_element(u.begin(), u.begin() + (a - 1), u.end());
    return u[static_cast<std::size_t>(a - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace csrover

#endif  // CSROVER_RANDOM_H_
