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
#include <functional>
#include <string>
#include <vector>

#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/hamiltonian.hpp"
#include "fqdyn/linalg.hpp"

namespace fqdyn {

struct OccupiedOrbitals {
  CMatrix coeffs;  // N x eta
  GridSpec grid;

  int eta() const { return static_cast<int>(coeffs.cols()); }
  Eigen::Index num_points() const { return coeffs.rows(); }
};

/// Grid-basis integrals: one-body h and the diagonal two-body kernel
/// (mu nu|lambda sigma) = delta_{mu nu} delta_{lambda sigma} v(mu, lambda).
struct GridIntegrals {
  GridSpec grid;
  CMatrix h;
  RMatrix v;

  Eigen::Index size() const { return h.rows(); }

  static GridIntegrals from_hamiltonian(const GridHamiltonian& ham) {
    const auto n = static_cast<Eigen::Index>(ham.grid().num_points());
    GridIntegrals g;
    g.grid = ham.grid();
    g.h = kinetic_matrix(ham.grid());
    for (Eigen::Index p = 0; p < n; ++p) {
      double u = ham.one_body(static_cast<std::size_t>(p));
      if (std::isnan(u)) throw SingularPotential("a nucleus sits on grid point " + std::to_string(p));
      g.h(p, p) += u;
    }
    g.v.resize(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        g.v(p, q) = (p == q && ham.kernel().is_bare())
                        ? 0.0
                        : ham.pair(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
    return g;
  }

  static GridIntegrals build(const GridSpec& grid, const NuclearConfig& nuclei = {},
                             CoulombKernel kernel = CoulombKernel::bare()) {
    return from_hamiltonian(GridHamiltonian(grid, nuclei, kernel));
  }

  /// Zeroes the two-body part.
  GridIntegrals non_interacting() const {
    GridIntegrals g = *this;
    g.v.setZero();
    return g;
  }
};

inline CMatrix mean_field_1rdm(const CMatrix& c) { return c * c.adjoint(); }
inline CMatrix mean_field_1rdm(const OccupiedOrbitals& c) { return mean_field_1rdm(c.coeffs); }

/// F = h + J[P] - K[P]/2 with J = diag(v diag(P)) and K = v o P.
inline CMatrix build_fock_from_density(const CMatrix& p, const GridIntegrals& ints) {
  const Eigen::Index n = ints.size();
  if (p.rows() != n || p.cols() != n) throw DimensionMismatch("density does not match integrals");
  if (ints.v.rows() != n || ints.v.cols() != n)
    throw DimensionMismatch("two-body kernel does not match one-body block");
  RVector occ = p.diagonal().real();
  RVector coulomb = ints.v * occ;
  CMatrix f = ints.h;
  f.diagonal() += coulomb.cast<cplx>();
  f -= 0.5 * ints.v.cast<cplx>().cwiseProduct(p);
  return f;
}

inline CMatrix build_fock(const CMatrix& c, const GridIntegrals& ints) {
  if (c.rows() != ints.size()) throw DimensionMismatch("orbitals do not match integrals");
  return build_fock_from_density(mean_field_1rdm(c), ints);
}

/// E = tr[(h + F) P] / 2.
inline double hf_energy(const CMatrix& c, const GridIntegrals& ints) {
  CMatrix p = mean_field_1rdm(c);
  CMatrix f = build_fock_from_density(p, ints);
  return 0.5 * ((ints.h + f) * p).trace().real();
}

inline double fock_spectral_norm(const CMatrix& c, const GridIntegrals& ints) {
  CMatrix f = build_fock(c, ints);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(f, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Lowest-eta eigenvectors of the one-body Hamiltonian.
inline CMatrix lowest_orbitals(const CMatrix& h, int eta) {
  if (eta < 0 || eta > h.rows()) throw ValidationError("eta exceeds the basis size");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  return eig.eigenvectors().leftCols(eta);
}

enum class TdhfScheme { midpoint, rk4 };

inline TdhfScheme parse_scheme(const std::string& s) {
  if (s == "midpoint" || s == "exponential-midpoint") return TdhfScheme::midpoint;
  if (s == "rk4") return TdhfScheme::rk4;
  throw ValidationError("unknown TDHF scheme '" + s + "'");
}

struct TdhfPlan {
  double total_time = 0.0;
  int steps = 1;
  TdhfScheme scheme = TdhfScheme::midpoint;

  void validate() const {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (!std::isfinite(total_time)) throw ValidationError("total time is not finite");
  }
};

inline constexpr int kMidpointMaxIterations = 20;
inline constexpr double kMidpointTolerance = 1e-10;

inline CMatrix tdhf_step(const CMatrix& c, const GridIntegrals& ints, double dt,
                         TdhfScheme scheme = TdhfScheme::midpoint) {
  if (c.rows() != ints.size()) throw DimensionMismatch("orbitals do not match integrals");
  if (dt == 0.0) return c;
  if (scheme == TdhfScheme::rk4) {
    auto rhs = [&](const CMatrix& x) -> CMatrix { return -kI * build_fock(x, ints) * x; };
    CMatrix k1 = rhs(c);
    CMatrix k2 = rhs(c + 0.5 * dt * k1);
    CMatrix k3 = rhs(c + 0.5 * dt * k2);
    CMatrix k4 = rhs(c + dt * k3);
    return c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const CMatrix p0 = mean_field_1rdm(c);
  CMatrix next = hermitian_propagator(build_fock_from_density(p0, ints), dt) * c;
  for (int it = 0; it < kMidpointMaxIterations; ++it) {
    CMatrix p_mid = 0.5 * (p0 + mean_field_1rdm(next));
    CMatrix trial = hermitian_propagator(build_fock_from_density(p_mid, ints), dt) * c;
    double change = (trial - next).cwiseAbs().maxCoeff();
    next = std::move(trial);
    if (change <= kMidpointTolerance) return next;
  }
  throw ConvergenceFailure("midpoint iteration did not reach 1e-10 in " +
                           std::to_string(kMidpointMaxIterations) + " iterations");
}

inline OccupiedOrbitals tdhf_step(const OccupiedOrbitals& c, const GridIntegrals& ints,
                                  double dt, TdhfScheme scheme = TdhfScheme::midpoint) {
  return {tdhf_step(c.coeffs, ints, dt, scheme), c.grid};
}

/// Called after every step (and once at step 0) with (step, time, C).
using TdhfObserver = std::function<void(int, double, const CMatrix&)>;

inline CMatrix evolve_tdhf(const CMatrix& c0, const GridIntegrals& ints, const TdhfPlan& plan,
                           const TdhfObserver& observe = {}) {
  plan.validate();
  const double dt = plan.total_time / plan.steps;
  CMatrix c = c0;
  if (observe) observe(0, 0.0, c);
  for (int k = 1; k <= plan.steps; ++k) {
    c = tdhf_step(c, ints, dt, plan.scheme);
    if (observe) observe(k, k * dt, c);
  }
  return c;
}

inline OccupiedOrbitals evolve_tdhf(const OccupiedOrbitals& c0, const GridIntegrals& ints,
                                    const TdhfPlan& plan, const TdhfObserver& observe = {}) {
  return {evolve_tdhf(c0.coeffs, ints, plan, observe), c0.grid};
}

inline double idempotency_error(const CMatrix& p) { return (p * p - p).norm(); }

}  // namespace fqdyn
