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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace fqdyn {

struct SignedPermutation {
  std::vector<int> image;
  int sign = 1;
};

inline int permutation_sign(const std::vector<int>& p) {
  int inversions = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

/// All k! permutations of {0..k-1} in lexicographic order with their signs.
inline std::vector<SignedPermutation> all_permutations(int k) {
  std::vector<SignedPermutation> out;
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  do {
    out.push_back({p, permutation_sign(p)});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// eta! / (eta - k)!
inline double falling_factorial(int eta, int k) {
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= (eta - i);
  return f;
}

/// Calls f(tuple) for every strictly increasing k-tuple over [0, n), in
/// lexicographic order.
template <typename F>
void for_each_combination(std::size_t n, int k, F&& f) {
  if (k < 0 || static_cast<std::size_t>(k) > n) return;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), std::size_t{0});
  if (k == 0) {
    f(c);
    return;
  }
  while (true) {
    f(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

/// ceil(log2(x)) for x >= 1.
inline int ceil_log2(std::uint64_t x) {
  int bits = 0;
  while ((std::uint64_t{1} << bits) < x) ++bits;
  return bits;
}

}  // namespace fqdyn
