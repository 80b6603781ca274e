// Copyright 2026 The fqdyn Authors
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

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace fqdyn {

/// A reproducible random stream.
///
/// Every stochastic operation draws from a stream identified by the triple
/// (master seed, operation tag, counter). Two streams with the same triple
/// produce the same sequence; changing any element gives an independent
/// stream. The engine is std::mt19937_64, whose output sequence is fixed by
/// the standard.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view tag, std::uint64_t counter = 0)
      : engine_(derive_seed(seed, tag, counter)) {}

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t counter) {
    std::uint64_t tag_hash = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
    for (unsigned char c : tag) {
      tag_hash ^= c;
      tag_hash *= 0x100000001b3ULL;
    }
    std::uint64_t h = mix(seed);
    h = mix(h ^ tag_hash);
    h = mix(h ^ (counter + 0x9e3779b97f4a7c15ULL));
    return h;
  }

  /// Uniform double in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// Standard complex Gaussian (independent real and imaginary parts).
  std::complex<double> complex_normal() {
    double re = normal();
    double im = normal();
    return {re, im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace fqdyn
