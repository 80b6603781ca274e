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

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fqdyn/combinatorics.hpp"
#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/random.hpp"

namespace fqdyn {

/// Largest N^eta handled by the dense engine.
inline constexpr double kBruteForceAmplitudes = 16777216.0;  // 2^24

/// Dense first-quantized wavefunction: eta registers of n = ceil(log2 N)
/// qubits each, 2^(n*eta) amplitudes indexed by (p_1, ..., p_eta) with
/// register 0 most significant.
///
/// Register values >= N are padding. Physical states keep zero amplitude
/// there; intermediate buffers (for instance after a Clifford acts on a
/// register) may not.
class FirstQuantizedState {
 public:
  FirstQuantizedState(GridSpec grid, int eta) : grid_(grid), eta_(eta) {
    grid_.validate();
    if (eta < 1) throw ValidationError("particle count must be at least 1");
    num_points_ = grid_.num_points();
    if (std::pow(static_cast<double>(num_points_), eta) > kBruteForceAmplitudes)
      throw BruteForceLimitExceeded("N^eta = " + std::to_string(num_points_) + "^" +
                                    std::to_string(eta) + " exceeds 2^24");
    qubits_ = ceil_log2(num_points_);
    register_dim_ = std::size_t{1} << qubits_;
    std::size_t total = 1;
    for (int j = 0; j < eta; ++j) total *= register_dim_;
    amps_.assign(total, cplx{0.0, 0.0});
  }

  static FirstQuantizedState basis(GridSpec grid, std::span<const std::size_t> config) {
    FirstQuantizedState s(grid, static_cast<int>(config.size()));
    for (auto p : config)
      if (p >= s.num_points()) throw IndexOutOfRange("grid index beyond N");
    s.amps_[s.index_of(config)] = 1.0;
    return s;
  }

  static FirstQuantizedState basis(GridSpec grid, std::initializer_list<std::size_t> config) {
    std::vector<std::size_t> c(config);
    return basis(grid, std::span<const std::size_t>(c));
  }

  const GridSpec& grid() const { return grid_; }
  int eta() const { return eta_; }
  int qubits_per_register() const { return qubits_; }
  std::size_t num_points() const { return num_points_; }
  std::size_t register_dim() const { return register_dim_; }
  std::size_t size() const { return amps_.size(); }

  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }
  cplx& operator[](std::size_t i) { return amps_[i]; }

  bool antisymmetric() const { return antisymmetric_; }
  void set_antisymmetric(bool flag) { antisymmetric_ = flag; }

  std::size_t index_of(std::span<const std::size_t> config) const {
    std::size_t idx = 0;
    for (auto p : config) idx = idx * register_dim_ + p;
    return idx;
  }

  void decode(std::size_t idx, std::span<std::size_t> out) const {
    for (int j = eta_ - 1; j >= 0; --j) {
      out[j] = idx % register_dim_;
      idx /= register_dim_;
    }
  }

  std::vector<std::size_t> decode(std::size_t idx) const {
    std::vector<std::size_t> out(eta_);
    decode(idx, out);
    return out;
  }

  /// Number of amplitudes between consecutive values of register j.
  std::size_t stride(int j) const {
    std::size_t s = 1;
    for (int r = j + 1; r < eta_; ++r) s *= register_dim_;
    return s;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  void normalize() {
    double n = norm();
    if (n == 0.0) throw ZeroProjection("cannot normalize a zero vector");
    for (auto& a : amps_) a /= n;
  }

  /// Largest modulus found on a padding index.
  double padding_weight() const {
    double w = 0.0;
    std::vector<std::size_t> cfg(eta_);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (amps_[i] == cplx{}) continue;
      decode(i, cfg);
      for (auto p : cfg)
        if (p >= num_points_) w = std::max(w, std::abs(amps_[i]));
    }
    return w;
  }

 private:
  GridSpec grid_;
  int eta_;
  std::size_t num_points_ = 0;
  int qubits_ = 0;
  std::size_t register_dim_ = 1;
  std::vector<cplx> amps_;
  bool antisymmetric_ = false;
};

/// A single-particle orbital over the grid points.
struct OrbitalVector {
  CVector coeffs;

  static OrbitalVector basis(std::size_t n, std::size_t p) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(p)) = 1.0;
    return {v};
  }
};

inline cplx inner_product(const FirstQuantizedState& a, const FirstQuantizedState& b) {
  if (a.size() != b.size()) throw DimensionMismatch("states have different sizes");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// |<a|b>|, the global-phase-insensitive overlap.
inline double fidelity_modulus(const FirstQuantizedState& a, const FirstQuantizedState& b) {
  return std::abs(inner_product(a, b));
}

inline double max_abs_difference(const FirstQuantizedState& a, const FirstQuantizedState& b) {
  if (a.size() != b.size()) throw DimensionMismatch("states have different sizes");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Numerical check of the antisymmetry invariant: every register swap
/// negates the state and nothing lives on padding indices.
inline bool is_antisymmetric(const FirstQuantizedState& s, double tol = 1e-10) {
  const int eta = s.eta();
  std::vector<std::size_t> cfg(eta);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.decode(i, cfg);
    bool padded = false;
    for (auto p : cfg) padded |= (p >= s.num_points());
    if (padded) {
      if (std::abs(s[i]) > tol) return false;
      continue;
    }
    for (int a = 0; a < eta; ++a) {
      for (int b = a + 1; b < eta; ++b) {
        if (cfg[a] == cfg[b]) {
          if (std::abs(s[i]) > tol) return false;
          continue;
        }
        std::swap(cfg[a], cfg[b]);
        std::size_t j = s.index_of(cfg);
        std::swap(cfg[a], cfg[b]);
        if (std::abs(s[i] + s[j]) > tol) return false;
      }
    }
  }
  return true;
}

/// Projects onto the antisymmetric subspace and renormalizes. Padding
/// components are discarded by the projection.
inline FirstQuantizedState antisymmetrize(const FirstQuantizedState& in) {
  const int eta = in.eta();
  const auto perms = all_permutations(eta);
  const double inv_fact = 1.0 / factorial(eta);
  FirstQuantizedState out(in.grid(), eta);
  std::vector<std::size_t> cfg(eta);
  for_each_combination(in.num_points(), eta, [&](const std::vector<std::size_t>& sorted) {
    cplx c{};
    for (const auto& perm : perms) {
      for (int a = 0; a < eta; ++a) cfg[a] = sorted[perm.image[a]];
      c += static_cast<double>(perm.sign) * in[in.index_of(cfg)];
    }
    c *= inv_fact;
    if (c == cplx{}) return;
    for (const auto& perm : perms) {
      for (int a = 0; a < eta; ++a) cfg[a] = sorted[perm.image[a]];
      out[out.index_of(cfg)] = static_cast<double>(perm.sign) * c;
    }
  });
  double n = out.norm();
  if (n < 1e-12) throw ZeroProjection("antisymmetric component has norm " + std::to_string(n));
  for (auto& a : out.amplitudes()) a /= n;
  out.set_antisymmetric(true);
  return out;
}

/// Maps a sorted-configuration amplitude table onto the antisymmetric state
/// sum_pi sign(pi) |pi(S)> / sqrt(eta!). Unnormalized input is allowed.
template <typename Fn>
FirstQuantizedState antisymmetric_from_sorted(const GridSpec& grid, int eta, Fn&& amplitude_of) {
  FirstQuantizedState out(grid, eta);
  const auto perms = all_permutations(eta);
  const double scale = 1.0 / std::sqrt(factorial(eta));
  std::vector<std::size_t> cfg(eta);
  for_each_combination(out.num_points(), eta, [&](const std::vector<std::size_t>& sorted) {
    cplx c = amplitude_of(sorted);
    if (c == cplx{}) return;
    for (const auto& perm : perms) {
      for (int a = 0; a < eta; ++a) cfg[a] = sorted[perm.image[a]];
      out[out.index_of(cfg)] = static_cast<double>(perm.sign) * c * scale;
    }
  });
  out.set_antisymmetric(true);
  return out;
}

/// Slater determinant of the given orbitals: amplitude at (p_1..p_eta) is
/// det[phi_a(p_b)] / sqrt(eta!).
inline FirstQuantizedState slater_oracle(const CMatrix& orbitals, const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.num_points());
  if (orbitals.rows() != n)
    throw DimensionMismatch("orbital length does not match the grid");
  const int eta = static_cast<int>(orbitals.cols());
  if (orthonormality_deviation(orbitals) > 1e-8)
    throw NonOrthonormalInput("Gram matrix deviates from identity by " +
                              std::to_string(orthonormality_deviation(orbitals)));
  CMatrix block(eta, eta);
  return antisymmetric_from_sorted(grid, eta, [&](const std::vector<std::size_t>& s) {
    for (int a = 0; a < eta; ++a)
      for (int b = 0; b < eta; ++b) block(a, b) = orbitals(static_cast<Eigen::Index>(s[b]), a);
    return block.determinant();
  });
}

inline FirstQuantizedState slater_oracle(std::span<const OrbitalVector> orbitals,
                                         const GridSpec& grid) {
  if (orbitals.empty()) throw ValidationError("need at least one orbital");
  CMatrix c(orbitals[0].coeffs.size(), static_cast<Eigen::Index>(orbitals.size()));
  for (std::size_t a = 0; a < orbitals.size(); ++a) {
    if (orbitals[a].coeffs.size() != c.rows())
      throw DimensionMismatch("orbitals have different lengths");
    c.col(static_cast<Eigen::Index>(a)) = orbitals[a].coeffs;
  }
  return slater_oracle(c, grid);
}

/// Applies op (register_dim x register_dim) to register j without any
/// unitarity check. Clears the antisymmetry flag.
inline void apply_register_operator(FirstQuantizedState& s, int j, const CMatrix& op) {
  const std::size_t d = s.register_dim();
  const std::size_t inner = s.stride(j);
  const std::size_t outer = s.size() / (inner * d);
  auto amps = s.amplitudes();
  std::vector<cplx> buf(d), res(d);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * d * inner;
    for (std::size_t in = 0; in < inner; ++in) {
      for (std::size_t r = 0; r < d; ++r) buf[r] = amps[base + r * inner + in];
      for (std::size_t r = 0; r < d; ++r) {
        cplx acc{};
        for (std::size_t c = 0; c < d; ++c)
          acc += op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * buf[c];
        res[r] = acc;
      }
      for (std::size_t r = 0; r < d; ++r) amps[base + r * inner + in] = res[r];
    }
  }
  s.set_antisymmetric(false);
}

/// Returns (I x ... x U x ... x I) |state> with U on register j (0-based).
inline FirstQuantizedState apply_register_unitary(const FirstQuantizedState& s, int j,
                                                  const CMatrix& u) {
  if (j < 0 || j >= s.eta()) throw IndexOutOfRange("register index out of range");
  const auto d = static_cast<Eigen::Index>(s.register_dim());
  if (u.rows() != d || u.cols() != d)
    throw DimensionMismatch("register unitary must be 2^n x 2^n");
  double dev = unitarity_deviation(u);
  if (dev > 1e-8) throw NonUnitary("U^dagger U deviates from identity by " + std::to_string(dev));
  FirstQuantizedState out = s;
  apply_register_operator(out, j, u);
  return out;
}

/// Draws an index from the (unnormalized) weights.
inline std::size_t sample_index(std::span<const double> weights, double total, RngStream& rng) {
  double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_nonzero = i;
    if (u < acc) return i;
  }
  return last_nonzero;
}

/// Joint computational-basis measurement of all registers.
inline std::vector<std::size_t> measure_all(const FirstQuantizedState& s, RngStream& rng) {
  std::vector<double> probs(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    probs[i] = std::norm(s[i]);
    total += probs[i];
  }
  return s.decode(sample_index(probs, total, rng));
}

/// <psi| prod_l |i_l><j_l|_{x_l} |psi> with registers x (0-based).
inline cplx transition_expectation(const FirstQuantizedState& s, std::span<const int> x,
                                   std::span<const std::size_t> i,
                                   std::span<const std::size_t> j) {
  const std::size_t k = x.size();
  if (i.size() != k || j.size() != k)
    throw DimensionMismatch("register and orbital tuples differ in length");
  for (std::size_t a = 0; a < k; ++a) {
    if (x[a] < 0 || x[a] >= s.eta()) throw IndexOutOfRange("register index out of range");
    if (i[a] >= s.register_dim() || j[a] >= s.register_dim())
      throw IndexOutOfRange("orbital index out of range");
    for (std::size_t b = a + 1; b < k; ++b)
      if (x[a] == x[b]) throw DuplicateRegister("register " + std::to_string(x[a]) + " repeated");
  }
  std::vector<std::size_t> cfg(s.eta());
  cplx acc{};
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (s[idx] == cplx{}) continue;
    s.decode(idx, cfg);
    bool match = true;
    for (std::size_t a = 0; a < k && match; ++a) match = (cfg[x[a]] == j[a]);
    if (!match) continue;
    for (std::size_t a = 0; a < k; ++a) cfg[x[a]] = i[a];
    acc += std::conj(s[s.index_of(cfg)]) * s[idx];
  }
  return acc;
}

/// k-RDM element eta!/(eta-k)! <psi| prod_l |i_l><j_l|_l |psi>; equals
/// <psi| a+_{i_1}..a+_{i_k} a_{j_k}..a_{j_1} |psi> in second quantization.
inline cplx exact_krdm_element(const FirstQuantizedState& s, std::span<const std::size_t> i,
                               std::span<const std::size_t> j) {
  const int k = static_cast<int>(i.size());
  if (k < 1 || k > s.eta()) throw ValidationError("k must lie in [1, eta]");
  if (!is_antisymmetric(s, 1e-10)) throw NotAntisymmetric("state fails the antisymmetry check");
  std::vector<int> x(k);
  std::iota(x.begin(), x.end(), 0);
  return falling_factorial(s.eta(), k) * transition_expectation(s, x, i, j);
}

/// Full N x N one-body matrix rho(mu, nu) = <a+_mu a_nu>.
inline CMatrix exact_1rdm(const FirstQuantizedState& s) {
  if (!is_antisymmetric(s, 1e-10)) throw NotAntisymmetric("state fails the antisymmetry check");
  const auto n = static_cast<Eigen::Index>(s.num_points());
  CMatrix rho = CMatrix::Zero(n, n);
  std::vector<std::size_t> cfg(s.eta());
  const double eta = s.eta();
  // rho(mu, nu) = eta * sum_rest conj(psi(mu, rest)) psi(nu, rest)
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (s[idx] == cplx{}) continue;
    s.decode(idx, cfg);
    const auto nu = cfg[0];
    if (nu >= s.num_points()) continue;
    for (Eigen::Index mu = 0; mu < n; ++mu) {
      cfg[0] = static_cast<std::size_t>(mu);
      rho(mu, static_cast<Eigen::Index>(nu)) += eta * std::conj(s[s.index_of(cfg)]) * s[idx];
    }
  }
  return rho;
}

struct EquivalenceResult {
  FirstQuantizedState first_quantized;   // sum_j |p><q|_j |psi>
  FirstQuantizedState second_quantized;  // image of a+_p a_q, mapped back
  double deviation = 0.0;
  bool equal = false;
};

/// Compares sum_j |p><q|_j on an antisymmetric state with a+_p a_q acting on
/// the matching occupation-number vector (ascending mode order, sign
/// (-1)^(number of occupied modes before the acted-on mode)).
inline EquivalenceResult first_second_equivalence(const FirstQuantizedState& s, std::size_t p,
                                                  std::size_t q) {
  if (s.eta() > 3 || s.num_points() > 8)
    throw BruteForceLimitExceeded("equivalence check needs eta <= 3 and N <= 8");
  if (p >= s.num_points() || q >= s.num_points()) throw IndexOutOfRange("orbital beyond N");
  if (!is_antisymmetric(s, 1e-10)) throw NotAntisymmetric("state fails the antisymmetry check");
  const int eta = s.eta();
  const std::size_t n = s.num_points();

  // first-quantized side
  FirstQuantizedState lhs(s.grid(), eta);
  std::vector<std::size_t> cfg(eta);
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (s[idx] == cplx{}) continue;
    s.decode(idx, cfg);
    for (int r = 0; r < eta; ++r) {
      if (cfg[r] != q) continue;
      cfg[r] = p;
      lhs[lhs.index_of(cfg)] += s[idx];
      cfg[r] = q;
    }
  }

  // occupation-number vector: bitmask -> coefficient, c_S = sqrt(eta!) psi(S sorted)
  const double root_fact = std::sqrt(factorial(eta));
  std::vector<cplx> occ(std::size_t{1} << n, cplx{});
  for_each_combination(n, eta, [&](const std::vector<std::size_t>& sorted) {
    std::uint32_t mask = 0;
    for (auto o : sorted) mask |= 1u << o;
    occ[mask] = root_fact * s[s.index_of(sorted)];
  });
  auto parity_below = [](std::uint32_t mask, std::size_t mode) {
    return (std::popcount(mask & ((1u << mode) - 1u)) % 2 == 0) ? 1.0 : -1.0;
  };
  std::vector<cplx> image(occ.size(), cplx{});
  for (std::uint32_t mask = 0; mask < occ.size(); ++mask) {
    if (occ[mask] == cplx{}) continue;
    if (!(mask & (1u << q))) continue;
    double sign = parity_below(mask, q);
    std::uint32_t m2 = mask & ~(1u << q);
    if (m2 & (1u << p)) continue;
    sign *= parity_below(m2, p);
    image[m2 | (1u << p)] += sign * occ[mask];
  }
  FirstQuantizedState rhs = antisymmetric_from_sorted(
      s.grid(), eta, [&](const std::vector<std::size_t>& sorted) {
        std::uint32_t mask = 0;
        for (auto o : sorted) mask |= 1u << o;
        return image[mask];
      });
  EquivalenceResult result{lhs, rhs, max_abs_difference(lhs, rhs), false};
  result.equal = result.deviation <= 1e-10;
  return result;
}

inline bool first_second_equivalence_check(const FirstQuantizedState& s, std::size_t p,
                                           std::size_t q) {
  return first_second_equivalence(s, p, q).equal;
}

}  // namespace fqdyn
