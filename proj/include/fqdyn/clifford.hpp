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

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "fqdyn/errors.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/random.hpp"

namespace fqdyn {

/// Binary symplectic vector, interleaved (x_0, z_0, x_1, z_1, ...).
using SymplecticVector = std::vector<std::uint8_t>;
using SymplecticMatrix = std::vector<SymplecticVector>;

inline constexpr int kMaxCliffordQubits = 4;

/// |Sp(2n, F_2)| = 2^{n^2} prod_{j=1..n} (4^j - 1).
inline std::uint64_t symplectic_group_order(int n) {
  std::uint64_t order = std::uint64_t{1} << (n * n);
  for (int j = 1; j <= n; ++j) order *= (std::uint64_t{1} << (2 * j)) - 1;
  return order;
}

/// Number of Clifford elements modulo global phase.
inline std::uint64_t clifford_group_order(int n) {
  return symplectic_group_order(n) << (2 * n);
}

namespace detail {

inline int symplectic_inner(const SymplecticVector& v, const SymplecticVector& w) {
  int t = 0;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) t += v[i] * w[i + 1] + w[i] * v[i + 1];
  return t % 2;
}

inline SymplecticVector transvection(const SymplecticVector& k, const SymplecticVector& v) {
  SymplecticVector out = v;
  if (symplectic_inner(k, v))
    for (std::size_t i = 0; i < v.size(); ++i) out[i] ^= k[i];
  return out;
}

inline SymplecticVector int_to_bits(std::uint64_t i, std::size_t n) {
  SymplecticVector out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = i & 1U;
    i >>= 1;
  }
  return out;
}

inline SymplecticVector add(const SymplecticVector& a, const SymplecticVector& b) {
  SymplecticVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

/// Two transvections h1, h2 with y = Z_h1 Z_h2 x.
inline std::pair<SymplecticVector, SymplecticVector> find_transvection(const SymplecticVector& x,
                                                                       const SymplecticVector& y) {
  const std::size_t m = x.size();
  SymplecticVector zero(m, 0);
  if (x == y) return {zero, zero};
  if (symplectic_inner(x, y) == 1) return {add(x, y), zero};
  SymplecticVector z(m, 0);
  for (std::size_t ii = 0; ii < m; ii += 2) {
    if ((x[ii] | x[ii + 1]) && (y[ii] | y[ii + 1])) {
      z[ii] = x[ii] ^ y[ii];
      z[ii + 1] = x[ii + 1] ^ y[ii + 1];
      if (!(z[ii] | z[ii + 1])) {
        z[ii + 1] = 1;
        if (x[ii] != x[ii + 1]) z[ii] = 1;
      }
      return {add(x, z), add(y, z)};
    }
  }
  for (std::size_t ii = 0; ii < m; ii += 2) {
    if ((x[ii] | x[ii + 1]) && !(y[ii] | y[ii + 1])) {
      if (x[ii] == x[ii + 1]) {
        z[ii + 1] = 1;
      } else {
        z[ii + 1] = x[ii];
        z[ii] = x[ii + 1];
      }
      break;
    }
  }
  for (std::size_t ii = 0; ii < m; ii += 2) {
    if (!(x[ii] | x[ii + 1]) && (y[ii] | y[ii + 1])) {
      if (y[ii] == y[ii + 1]) {
        z[ii + 1] = 1;
      } else {
        z[ii + 1] = y[ii];
        z[ii] = y[ii + 1];
      }
      break;
    }
  }
  return {add(x, z), add(y, z)};
}

}  // namespace detail

/// The i-th element of Sp(2n), 0 <= i < |Sp(2n)| (Koenig-Smolin ordering).
/// Row 2q is the image of X_q, row 2q+1 the image of Z_q.
inline SymplecticMatrix symplectic_from_index(std::uint64_t i, int n) {
  using detail::transvection;
  const std::size_t nn = 2 * static_cast<std::size_t>(n);
  const std::uint64_t s = (std::uint64_t{1} << nn) - 1;
  const std::uint64_t k = (i % s) + 1;
  i /= s;
  SymplecticVector f1 = detail::int_to_bits(k, nn);
  SymplecticVector e1(nn, 0);
  e1[0] = 1;
  auto [t0, t1] = detail::find_transvection(e1, f1);
  SymplecticVector bits = detail::int_to_bits(i % (std::uint64_t{1} << (nn - 1)), nn - 1);
  SymplecticVector eprime = e1;
  for (std::size_t j = 2; j < nn; ++j) eprime[j] = bits[j - 1];
  SymplecticVector h0 = transvection(t1, transvection(t0, eprime));
  if (bits[0] == 1) std::fill(f1.begin(), f1.end(), 0);

  SymplecticMatrix g(nn, SymplecticVector(nn, 0));
  g[0][0] = 1;
  g[1][1] = 1;
  if (n > 1) {
    SymplecticMatrix sub = symplectic_from_index(i >> (nn - 1), n - 1);
    for (std::size_t r = 0; r < nn - 2; ++r)
      for (std::size_t c = 0; c < nn - 2; ++c) g[r + 2][c + 2] = sub[r][c];
  }
  for (std::size_t j = 0; j < nn; ++j)
    g[j] = transvection(f1, transvection(h0, transvection(t1, transvection(t0, g[j]))));
  return g;
}

/// Hermitian Pauli prod_q i^{x_q z_q} X^{x_q} Z^{z_q}; qubit 0 is the most
/// significant bit of the basis index.
inline CMatrix pauli_matrix(const SymplecticVector& v) {
  const int n = static_cast<int>(v.size() / 2);
  CMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    CMatrix f = CMatrix::Identity(2, 2);
    if (v[2 * q]) f = f * x;
    if (v[2 * q + 1]) f = f * z;
    if (v[2 * q] && v[2 * q + 1]) f *= kI;
    CMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
    out = std::move(next);
  }
  return out;
}

/// Dense unitary of Clifford `id` = symplectic_index * 4^n + sign_bits,
/// fixed up to a global phase.
inline CMatrix clifford_unitary_from_id(std::uint64_t id, int n) {
  const std::uint64_t signs = id & ((std::uint64_t{1} << (2 * n)) - 1);
  const SymplecticMatrix g = symplectic_from_index(id >> (2 * n), n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<CMatrix> xs(n), zs(n);
  for (int q = 0; q < n; ++q) {
    xs[q] = pauli_matrix(g[2 * q]);
    zs[q] = pauli_matrix(g[2 * q + 1]);
    if ((signs >> (2 * q)) & 1U) xs[q] *= -1.0;
    if ((signs >> (2 * q + 1)) & 1U) zs[q] *= -1.0;
  }
  CMatrix proj = CMatrix::Identity(dim, dim);
  for (int q = 0; q < n; ++q) proj = proj * (0.5 * (CMatrix::Identity(dim, dim) + zs[q]));
  Eigen::Index best = 0;
  proj.diagonal().real().maxCoeff(&best);
  CVector psi0 = proj.col(best);
  psi0 /= psi0.norm();
  CMatrix u(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    CVector col = psi0;
    for (int q = 0; q < n; ++q)
      if ((x >> (n - 1 - q)) & 1) col = xs[q] * col;
    u.col(x) = col;
  }
  return u;
}

/// Cache of all Clifford unitaries for n <= 2.
inline const std::vector<CMatrix>& clifford_table(int n) {
  if (n < 1 || n > 2) throw EnumerationUnavailable("Clifford enumeration only for n <= 2");
  static std::once_flag once[2];
  static std::vector<CMatrix> tables[2];
  std::call_once(once[n - 1], [n] {
    const std::uint64_t order = clifford_group_order(n);
    tables[n - 1].reserve(order);
    for (std::uint64_t id = 0; id < order; ++id)
      tables[n - 1].push_back(clifford_unitary_from_id(id, n));
  });
  return tables[n - 1];
}

inline CMatrix clifford_unitary(std::uint64_t id, int n) {
  if (n <= 2) return clifford_table(n)[id];
  return clifford_unitary_from_id(id, n);
}

struct CliffordElement {
  int n = 1;
  std::uint64_t id = 0;
  CMatrix unitary;
};

inline std::uint64_t sample_clifford_id(int n, RngStream& rng) {
  if (n < 1 || n > kMaxCliffordQubits)
    throw ValidationError("Clifford sampling supports 1 <= n <= 4");
  return rng.below(clifford_group_order(n));
}

inline CliffordElement sample_clifford(int n, RngStream& rng) {
  std::uint64_t id = sample_clifford_id(n, rng);
  return {n, id, clifford_unitary(id, n)};
}

}  // namespace fqdyn
