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

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fqdyn/combinatorics.hpp"
#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/state.hpp"

namespace fqdyn {

/// Two-orbital rotation on modes (a, b):
///   R e_a = cos(theta) e_a + e^{i phi} sin(theta) e_b
///   R e_b = -e^{-i phi} sin(theta) e_a + cos(theta) e_b
struct GivensRotation {
  int a = 0;
  int b = 1;
  double theta = 0.0;
  double phi = 0.0;

  CMatrix block() const {
    const double c = std::cos(theta), s = std::sin(theta);
    CMatrix r(2, 2);
    r << c, -std::exp(-kI * phi) * s, std::exp(kI * phi) * s, c;
    return r;
  }

  /// Left-multiplies rows (a, b) of m by R.
  void apply(CMatrix& m) const {
    CMatrix r = block();
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      cplx xa = m(a, col), xb = m(b, col);
      m(a, col) = r(0, 0) * xa + r(0, 1) * xb;
      m(b, col) = r(1, 0) * xa + r(1, 1) * xb;
    }
  }

  void apply_inverse(CMatrix& m) const {
    CMatrix r = block().adjoint();
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      cplx xa = m(a, col), xb = m(b, col);
      m(a, col) = r(0, 0) * xa + r(0, 1) * xb;
      m(b, col) = r(1, 0) * xa + r(1, 1) * xb;
    }
  }
};

/// Layered network: layers[q] acts within orbitals [q, q + eta] and is
/// listed in application order for preparation.
struct GivensNetwork {
  int num_orbitals = 0;
  int eta = 0;
  std::vector<std::vector<GivensRotation>> layers;

  std::size_t rotation_count() const {
    std::size_t c = 0;
    for (const auto& l : layers) c += l.size();
    return c;
  }

  /// Single-particle unitary U (preparation order) acting on orbital space.
  CMatrix unitary() const {
    CMatrix u = CMatrix::Identity(num_orbitals, num_orbitals);
    for (const auto& layer : layers)
      for (const auto& g : layer) g.apply(u);
    return u;
  }

  /// Occupied block produced from the reference "first eta orbitals".
  CMatrix reference_image() const { return unitary().leftCols(eta); }
};

namespace detail {

/// Unit vector in the orthogonal complement of span(b), as close to the
/// last basis vector as possible.
inline CVector complement_vector(const CMatrix& b) {
  const Eigen::Index m = b.rows();
  Eigen::ColPivHouseholderQR<CMatrix> qr(b);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  CMatrix q = qr.householderQ();
  CMatrix basis = q.leftCols(rank);
  CVector e = CVector::Zero(m);
  e(m - 1) = 1.0;
  CVector u = e - basis * (basis.adjoint() * e);
  if (u.norm() > 1e-8) return u / u.norm();
  CVector any = q.col(rank);
  return any / any.norm();
}

}  // namespace detail

inline constexpr double kGivensResidualTolerance = 1e-9;

inline GivensNetwork givens_decompose(const CMatrix& c_occ) {
  const int n = static_cast<int>(c_occ.rows());
  const int eta = static_cast<int>(c_occ.cols());
  if (eta < 1 || eta > n) throw ValidationError("need 1 <= eta <= N");
  if (orthonormality_deviation(c_occ) > 1e-8)
    throw NonOrthonormalInput("occupied columns are not orthonormal");

  GivensNetwork net{n, eta, std::vector<std::vector<GivensRotation>>(n - eta)};
  CMatrix b = c_occ;
  for (int q = n - eta - 1; q >= 0; --q) {
    CVector u = detail::complement_vector(b.middleRows(q, eta + 1));
    std::vector<GivensRotation> reduction;
    for (int a = 0; a < eta; ++a) {
      const cplx xa = u(a), xb = u(a + 1);
      const double ra = std::abs(xa), rb = std::abs(xb);
      if (ra <= 1e-14) continue;
      const double r = std::hypot(ra, rb);
      GivensRotation g{q + a, q + a + 1, std::atan2(ra / r, rb / r), 0.0};
      if (rb > 0.0) g.phi = -std::arg(-(xa / ra) / (xb / rb));
      // reduction applies R^dagger to both the pivot vector and the matrix
      CMatrix pair(2, 1);
      pair << xa, xb;
      CMatrix rotated = g.block().adjoint() * pair;
      u(a) = rotated(0, 0);
      u(a + 1) = rotated(1, 0);
      g.apply_inverse(b);
      reduction.push_back(g);
    }
    // preparation runs the reduction backwards
    net.layers[q].assign(reduction.rbegin(), reduction.rend());
  }
  double residual = n > eta ? b.bottomRows(n - eta).cwiseAbs().maxCoeff() : 0.0;
  if (residual > kGivensResidualTolerance)
    throw DecompositionFailure("rows beyond eta retain magnitude " + std::to_string(residual));
  return net;
}

/// Per-primitive Toffoli tallies of the improved conversion.
struct ToffoliLedger {
  std::uint64_t increment = 0;
  std::uint64_t controlled_unary = 0;
  std::uint64_t simultaneous_unary = 0;
  std::uint64_t mcnot = 0;

  std::uint64_t total() const { return increment + controlled_unary + simultaneous_unary + mcnot; }
};

struct LedgerRow {
  int q = 0;
  ToffoliLedger step;
  std::uint64_t cumulative = 0;
};

/// Joint (second-quantized window, xi, first-quantized registers) state
/// stored as a sparse map over computational branches.
struct ConversionRegisters {
  using Key = std::tuple<std::uint64_t, int, std::vector<std::size_t>>;

  int eta = 0;
  int num_orbitals = 0;
  std::map<Key, cplx> branches;
  ToffoliLedger ledger;
  std::vector<LedgerRow> history;

  static ConversionRegisters reference(int num_orbitals, int eta) {
    if (num_orbitals > 63) throw ValidationError("at most 63 orbitals supported");
    ConversionRegisters r{eta, num_orbitals, {}, {}, {}};
    std::uint64_t mask = (eta >= 64) ? ~0ULL : ((1ULL << eta) - 1ULL);
    r.branches[{mask, 0, std::vector<std::size_t>(eta, 0)}] = 1.0;
    return r;
  }

  static ConversionRegisters from_occupations(int num_orbitals, int eta,
                                              const std::map<std::uint64_t, cplx>& amps) {
    ConversionRegisters r{eta, num_orbitals, {}, {}, {}};
    for (const auto& [mask, a] : amps) r.branches[{mask, 0, std::vector<std::size_t>(eta, 0)}] = a;
    return r;
  }

  int xi_qubits() const { return ceil_log2(static_cast<std::uint64_t>(eta) + 1); }

  double norm() const {
    double s = 0.0;
    for (const auto& [k, a] : branches) s += std::norm(a);
    return std::sqrt(s);
  }

  /// Largest total probability on any still-occupied window qubit.
  double window_population() const {
    double worst = 0.0;
    for (int q = 0; q < num_orbitals; ++q) {
      double p = 0.0;
      for (const auto& [k, a] : branches)
        if (std::get<0>(k) & (1ULL << q)) p += std::norm(a);
      worst = std::max(worst, p);
    }
    return worst;
  }
};

/// Fermionic Givens rotation on adjacent modes: acts on |10>, |01>, leaves
/// |00>, |11> fixed.
inline void apply_fermionic_givens(ConversionRegisters& r, const GivensRotation& g) {
  if (g.b != g.a + 1) throw ValidationError("fermionic Givens rotation needs adjacent modes");
  const CMatrix blk = g.block();
  const std::uint64_t ba = 1ULL << g.a, bb = 1ULL << g.b;
  std::map<ConversionRegisters::Key, cplx> out;
  for (const auto& [key, amp] : r.branches) {
    const auto& [mask, xi, regs] = key;
    const bool oa = mask & ba, ob = mask & bb;
    if (oa == ob) {
      out[key] += amp;
      continue;
    }
    const std::uint64_t rest = mask & ~(ba | bb);
    // column index: 0 when the particle sits on a, 1 when on b
    const int col = oa ? 0 : 1;
    out[{rest | ba, xi, regs}] += blk(0, col) * amp;
    out[{rest | bb, xi, regs}] += blk(1, col) * amp;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == cplx{}; });
  r.branches = std::move(out);
}

/// One step of the sliding-window conversion on window qubit q.
inline void conversion_step(ConversionRegisters& r, int q) {
  if (q < 0 || q >= r.num_orbitals) throw IndexOutOfRange("window qubit out of range");
  const std::uint64_t bit = 1ULL << q;
  std::map<ConversionRegisters::Key, cplx> out;
  for (auto& [key, amp] : r.branches) {
    auto [mask, xi, regs] = key;
    if (mask & bit) {
      if (xi >= r.eta) throw OrderingViolation("more than eta ones encountered");
      if (xi > 0 && regs[xi - 1] >= static_cast<std::size_t>(q))
        throw OrderingViolation("label " + std::to_string(q) + " not above register " +
                                std::to_string(xi - 1));
      regs[xi] = static_cast<std::size_t>(q);
      ++xi;
      mask &= ~bit;
    }
    out[{mask, xi, regs}] += amp;
  }
  r.branches = std::move(out);

  const int n_eta = r.xi_qubits();
  ToffoliLedger step;
  step.increment = static_cast<std::uint64_t>(n_eta - 1);
  step.controlled_unary = static_cast<std::uint64_t>(r.eta - 1);
  step.simultaneous_unary = static_cast<std::uint64_t>(r.eta);
  step.mcnot = static_cast<std::uint64_t>(r.eta);
  r.ledger.increment += step.increment;
  r.ledger.controlled_unary += step.controlled_unary;
  r.ledger.simultaneous_unary += step.simultaneous_unary;
  r.ledger.mcnot += step.mcnot;
  r.history.push_back({q, step, r.ledger.total()});
}

inline constexpr double kResidualPopulationTolerance = 1e-10;

struct PreparationResult {
  FirstQuantizedState state;
  GivensNetwork network;
  ToffoliLedger ledger;
  std::vector<LedgerRow> history;
  double joint_norm = 0.0;
};

inline PreparationResult prepare_slater_detailed(const CMatrix& c_occ, const GridSpec& grid) {
  const int n = static_cast<int>(c_occ.rows());
  const int eta = static_cast<int>(c_occ.cols());
  if (static_cast<std::size_t>(n) != grid.num_points())
    throw DimensionMismatch("orbital length does not match the grid");
  FirstQuantizedState shape(grid, eta);  // enforces the brute-force limit

  GivensNetwork net = givens_decompose(c_occ);
  ConversionRegisters regs = ConversionRegisters::reference(n, eta);
  for (int q = 0; q < n; ++q) {
    if (q < n - eta)
      for (const auto& g : net.layers[q]) apply_fermionic_givens(regs, g);
    conversion_step(regs, q);
  }
  double residual = regs.window_population();
  if (residual > kResidualPopulationTolerance)
    throw ResidualPopulation("window population " + std::to_string(residual));

  std::map<std::vector<std::size_t>, cplx> sorted_amps;
  for (const auto& [key, amp] : regs.branches) {
    const auto& [mask, xi, labels] = key;
    if (xi != eta) {
      if (std::abs(amp) > kResidualPopulationTolerance)
        throw ResidualPopulation("branch ended with xi != eta");
      continue;
    }
    sorted_amps[labels] += amp;
  }
  FirstQuantizedState out =
      antisymmetric_from_sorted(grid, eta, [&](const std::vector<std::size_t>& s) {
        auto it = sorted_amps.find(s);
        return it == sorted_amps.end() ? cplx{} : it->second;
      });
  return {std::move(out), std::move(net), regs.ledger, std::move(regs.history), regs.norm()};
}

inline FirstQuantizedState prepare_slater(const CMatrix& c_occ, const GridSpec& grid) {
  return prepare_slater_detailed(c_occ, grid).state;
}

enum class ToffoliVariant { basic, improved };

/// Leading-order Toffoli count of the second-to-first quantized conversion.
inline std::uint64_t toffoli_count(std::uint64_t n, std::uint64_t eta, ToffoliVariant variant) {
  if (n < 2 || eta < 1 || eta >= n) throw ValidationError("need N >= 2 and 1 <= eta < N");
  const auto n_eta = static_cast<std::uint64_t>(ceil_log2(eta + 1));
  const auto log_n = static_cast<std::uint64_t>(ceil_log2(n));
  if (variant == ToffoliVariant::basic) return n * (2 * eta + n_eta - 3 + eta * log_n);
  return n * (3 * eta + n_eta - 2);
}

/// Order-of-magnitude estimate eta log eta log N of the sorting-network
/// antisymmetrization (not part of the ledger).
inline double antisymmetrization_estimate(double n, double eta) {
  return eta * std::max(1.0, std::log2(eta)) * std::log2(n);
}

}  // namespace fqdyn
