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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fqdyn/clifford.hpp"
#include "oracles.hpp"

namespace fqdyn {
namespace {

TEST(CliffordOrder, KnownValues) {
  EXPECT_EQ(symplectic_group_order(1), 6u);
  EXPECT_EQ(symplectic_group_order(2), 720u);
  EXPECT_EQ(clifford_group_order(1), 24u);
  EXPECT_EQ(clifford_group_order(2), 11520u);
  EXPECT_EQ(clifford_group_order(3), 92897280u);
}

TEST(CliffordTable, IdZeroIsIdentity) {
  for (int n : {1, 2}) {
    CMatrix u = clifford_unitary(0, n);
    CMatrix id = CMatrix::Identity(u.rows(), u.cols());
    EXPECT_EQ(oracle::phase_key(u), oracle::phase_key(id));
  }
}

TEST(CliffordTable, SingleQubitMatchesClosure) {
  auto closure = oracle::single_qubit_clifford_closure();
  ASSERT_EQ(closure.size(), 24u);
  std::set<std::vector<long long>> seen;
  for (const auto& u : clifford_table(1)) {
    EXPECT_LT(unitarity_deviation(u), 1e-12);
    auto key = oracle::phase_key(u);
    EXPECT_TRUE(closure.count(key));
    seen.insert(key);
  }
  EXPECT_EQ(seen.size(), 24u);
}

TEST(CliffordTable, TwoQubitElementsDistinct) {
  std::set<std::vector<long long>> seen;
  for (const auto& u : clifford_table(2)) seen.insert(oracle::phase_key(u));
  EXPECT_EQ(seen.size(), 11520u);
}

TEST(CliffordTable, EnumerationLimit) {
  EXPECT_THROW(clifford_table(3), EnumerationUnavailable);
}

/// U P U^dagger is +-(Hermitian Pauli) for every Pauli generator.
bool conjugates_paulis(const CMatrix& u, int n) {
  for (int q = 0; q < n; ++q)
    for (int kind : {0, 1}) {
      std::vector<std::uint8_t> v(2 * n, 0);
      v[2 * q + kind] = 1;
      CMatrix img = u * pauli_matrix(v) * u.adjoint();
      bool found = false;
      for (std::uint64_t w = 1; w < (1ULL << (2 * n)) && !found; ++w) {
        std::vector<std::uint8_t> bits(2 * n);
        for (int b = 0; b < 2 * n; ++b) bits[b] = (w >> b) & 1;
        CMatrix p = pauli_matrix(bits);
        found = (img - p).cwiseAbs().maxCoeff() < 1e-10 || (img + p).cwiseAbs().maxCoeff() < 1e-10;
      }
      if (!found) return false;
    }
  return true;
}

TEST(CliffordSampling, ConjugatesPaulisToPaulis) {
  RngStream rng(20, "pauli");
  for (int n : {1, 2, 3})
    for (int trial = 0; trial < 15; ++trial) {
      auto c = sample_clifford(n, rng);
      EXPECT_LT(unitarity_deviation(c.unitary), 1e-12);
      EXPECT_TRUE(conjugates_paulis(c.unitary, n)) << "n=" << n << " id=" << c.id;
    }
}

TEST(CliffordSampling, UniformOverSingleQubitGroup) {
  auto closure = oracle::single_qubit_clifford_closure();
  std::map<std::vector<long long>, int> counts;
  RngStream rng(21, "freq");
  const int m = 100000;
  for (int s = 0; s < m; ++s) ++counts[oracle::phase_key(sample_clifford(1, rng).unitary)];
  ASSERT_EQ(counts.size(), 24u);
  const double p = 1.0 / 24, sigma = std::sqrt(p * (1 - p) / m);
  for (const auto& [key, c] : counts) {
    EXPECT_TRUE(closure.count(key));
    EXPECT_NEAR(static_cast<double>(c) / m, p, 5 * sigma);
  }
}

TEST(CliffordSampling, DeterministicPerStream) {
  RngStream a(22, "det"), b(22, "det");
  for (int s = 0; s < 100; ++s) EXPECT_EQ(sample_clifford_id(3, a), sample_clifford_id(3, b));
  EXPECT_THROW(sample_clifford_id(5, a), ValidationError);
}

}  // namespace
}  // namespace fqdyn
