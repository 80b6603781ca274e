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

#include "fqdyn/meanfield.hpp"
#include "oracles.hpp"

namespace fqdyn {
namespace {

GridIntegrals line_system(int points, double omega) {
  NuclearConfig nuc;
  nuc.add(1, {0.3, 0, 0});
  nuc.add(1, {-1.3, 0, 0});
  return GridIntegrals::build(GridSpec::make(1, points, omega), nuc);
}

/// Ground orbitals with a momentum kick so that the density moves.
CMatrix kicked_ground(const GridIntegrals& ints, int eta, double kick) {
  CMatrix c = lowest_orbitals(ints.h, eta);
  for (Eigen::Index p = 0; p < c.rows(); ++p)
    c.row(p) *= std::exp(kI * kick * ints.grid.position(static_cast<std::size_t>(p))[0]);
  return c;
}

TEST(Integrals, HermitianAndSymmetric) {
  auto ints = line_system(9, 12.0);
  EXPECT_LT((ints.h - ints.h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((ints.v - ints.v.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GE(ints.v.minCoeff(), 0.0);
  for (Eigen::Index p = 0; p < 9; ++p) EXPECT_EQ(ints.v(p, p), 0.0);
  auto soft = GridIntegrals::build(GridSpec::make(1, 5, 5.0), {}, CoulombKernel::softened(0.5));
  EXPECT_DOUBLE_EQ(soft.v(2, 2), 2.0);
}

TEST(BuildFock, EmptyDensityGivesCoreHamiltonian) {
  auto ints = line_system(7, 7.0);
  CMatrix c(7, 0);
  EXPECT_LT((build_fock(c, ints) - ints.h).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildFock, SingleElectronConstantKernel) {
  const double cst = 0.7;
  GridIntegrals ints;
  ints.grid = GridSpec::make(1, 4, 4.0);
  ints.h = CMatrix::Zero(4, 4);
  ints.v = RMatrix::Constant(4, 4, cst);
  CMatrix e0 = CMatrix::Identity(4, 1);
  CMatrix f = build_fock(e0, ints);
  CMatrix expect = CMatrix::Identity(4, 4) * cst;
  expect(0, 0) -= cst / 2;
  EXPECT_LT((f - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildFock, MatchesFourIndexContraction) {
  // F = h + sum_{ls} ((mn|ls) - (ms|ln)/2) P_sl with (mn|ls) = d_mn d_ls v(m,l)
  auto ints = line_system(5, 6.0);
  RngStream rng(1, "fock");
  CMatrix c = random_orthonormal_columns(5, 2, rng);
  CMatrix p = c * c.adjoint();
  auto eri = [&](int m, int n, int l, int s) { return (m == n && l == s) ? ints.v(m, l) : 0.0; };
  CMatrix f = ints.h;
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 5; ++n)
      for (int l = 0; l < 5; ++l)
        for (int s = 0; s < 5; ++s) f(m, n) += (eri(m, n, l, s) - 0.5 * eri(m, s, l, n)) * p(s, l);
  EXPECT_LT((build_fock(c, ints) - f).cwiseAbs().maxCoeff(), 1e-13);
  CMatrix built = build_fock(c, ints);
  EXPECT_LT((built - built.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildFock, PermutationCovariance) {
  auto ints = line_system(6, 8.0);
  RngStream rng(2, "perm");
  CMatrix c = random_orthonormal_columns(6, 2, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 3, 0, 5, 1, 4, 2;
  CMatrix pm = perm.toDenseMatrix().cast<cplx>();
  GridIntegrals moved = ints;
  moved.h = pm * ints.h * pm.transpose();
  moved.v = perm.toDenseMatrix().cast<double>() * ints.v * perm.toDenseMatrix().cast<double>().transpose();
  CMatrix f = build_fock(c, ints);
  CMatrix fm = build_fock(pm * c, moved);
  EXPECT_LT((fm - pm * f * pm.transpose()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BuildFock, DimensionMismatch) {
  auto ints = line_system(5, 5.0);
  EXPECT_THROW(build_fock(CMatrix::Identity(4, 1), ints), DimensionMismatch);
}

TEST(TdhfStep, ZeroStepIsIdentity) {
  auto ints = line_system(8, 8.0);
  CMatrix c = kicked_ground(ints, 2, 0.4);
  EXPECT_EQ((tdhf_step(c, ints, 0.0) - c).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TdhfStep, NonInteractingMatchesExponential) {
  auto ints = line_system(8, 8.0).non_interacting();
  CMatrix c = kicked_ground(ints, 2, 0.4);
  const double dt = 0.05;
  CMatrix exact = hermitian_propagator(ints.h, dt) * c;
  EXPECT_LT((tdhf_step(c, ints, dt, TdhfScheme::midpoint) - exact).norm(), 1e-12);
  double e1 = (tdhf_step(c, ints, dt, TdhfScheme::rk4) - exact).norm();
  double e2 = (tdhf_step(c, ints, dt / 2, TdhfScheme::rk4) - hermitian_propagator(ints.h, dt / 2) * c).norm();
  EXPECT_GT(e1 / e2, 16.0);  // local error O(dt^5)
}

TEST(TdhfStep, PreservesOrthonormality) {
  auto ints = line_system(10, 10.0);
  CMatrix c = kicked_ground(ints, 3, 0.7);
  for (int k = 0; k < 20; ++k) {
    c = tdhf_step(c, ints, 0.05);
    EXPECT_LT(orthonormality_deviation(c), 1e-9);
  }
}

TEST(TdhfStep, ConvergenceFailure) {
  GridIntegrals ints = line_system(6, 6.0);
  ints.v *= 500.0;
  CMatrix c = kicked_ground(ints, 2, 1.0);
  EXPECT_THROW(tdhf_step(c, ints, 5.0), ConvergenceFailure);
}

TEST(EvolveTdhf, ConservationAlongTrajectory) {
  auto ints = line_system(16, 16.0);
  CMatrix c0 = kicked_ground(ints, 2, 0.5);
  const double e0 = hf_energy(c0, ints);
  double drift = 0.0, idem = 0.0, trace_dev = 0.0;
  evolve_tdhf(c0, ints, {1.0, 1000, TdhfScheme::midpoint}, [&](int, double, const CMatrix& c) {
    CMatrix p = mean_field_1rdm(c);
    drift = std::max(drift, std::abs(hf_energy(c, ints) - e0));
    idem = std::max(idem, idempotency_error(p));
    trace_dev = std::max(trace_dev, std::abs(p.trace() - 2.0));
  });
  EXPECT_LT(drift, 1e-6);
  EXPECT_LT(idem, 1e-8);
  EXPECT_LT(trace_dev, 1e-12);
}

TEST(EvolveTdhf, MidpointSelfConvergenceIsSecondOrder) {
  auto ints = line_system(12, 12.0);
  CMatrix c0 = kicked_ground(ints, 2, 0.8);
  auto run = [&](int steps) { return evolve_tdhf(c0, ints, {1.0, steps, TdhfScheme::midpoint}); };
  auto proj = [](const CMatrix& c) { return CMatrix(c * c.adjoint()); };
  CMatrix ref = proj(run(16 * 40));
  std::vector<double> errs;
  for (int steps : {10, 20, 40}) errs.push_back((proj(run(steps)) - ref).norm());
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 1.2);
  EXPECT_NEAR(errs[1] / errs[2], 4.0, 1.2);
}

TEST(FockNorm, KineticMaximumWithoutInteractions) {
  auto g = GridSpec::make(2, 5, 9.0);
  auto ints = GridIntegrals::build(g).non_interacting();
  RngStream rng(3, "norm");
  CMatrix c = random_orthonormal_columns(25, 3, rng);
  EXPECT_NEAR(fock_spectral_norm(c, ints), kinetic_phase_table(g).maxCoeff(), 1e-10);
}

TEST(FockNorm, EmptyDensity) {
  auto ints = line_system(7, 9.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(ints.h);
  EXPECT_NEAR(fock_spectral_norm(CMatrix(7, 0), ints), eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FockNorm, EnvelopeOnSmallSweep) {
  double worst = 0.0;
  RngStream rng(4, "sweep");
  for (int m : {3, 5})
    for (int eta : {2, 3}) {
      auto g = GridSpec::make(3, m, 4.0 * eta);
      auto ints = GridIntegrals::build(g);
      const double delta = g.spacing();
      for (int trial = 0; trial < 5; ++trial) {
        CMatrix c = random_orthonormal_columns(static_cast<Eigen::Index>(g.num_points()), eta, rng);
        double ratio = fock_spectral_norm(c, ints) / (std::pow(eta, 2.0 / 3) / delta + 1.0 / (delta * delta));
        worst = std::max(worst, ratio);
      }
    }
  EXPECT_LE(worst, 1.5 * std::numbers::pi * std::numbers::pi);
}

TEST(MeanFieldRdm, Projector) {
  CMatrix p = mean_field_1rdm(CMatrix::Identity(5, 2));
  CMatrix expect = CMatrix::Zero(5, 5);
  expect(0, 0) = expect(1, 1) = 1.0;
  EXPECT_EQ((p - expect).cwiseAbs().maxCoeff(), 0.0);
  RngStream rng(5, "rdm");
  CMatrix q = mean_field_1rdm(random_orthonormal_columns(6, 3, rng));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(q);
  for (Eigen::Index a = 0; a < 6; ++a) {
    double ev = eig.eigenvalues()(a);
    EXPECT_TRUE(std::abs(ev) < 1e-10 || std::abs(ev - 1.0) < 1e-10);
  }
}

TEST(MeanFieldRdm, AgreesWithFirstQuantizedOracle) {
  RngStream rng(6, "cross");
  for (int n : {4, 6, 8})
    for (int eta : {1, 2, 3}) {
      auto g = GridSpec::make(1, n, n);
      CMatrix c = random_orthonormal_columns(n, eta, rng);
      CMatrix p = mean_field_1rdm(c);
      auto s = slater_oracle(c, g);
      for (std::size_t mu = 0; mu < static_cast<std::size_t>(n); ++mu)
        for (std::size_t nu = 0; nu < static_cast<std::size_t>(n); ++nu) {
          std::vector<std::size_t> i{nu}, j{mu};
          EXPECT_LT(std::abs(p(mu, nu) - exact_krdm_element(s, i, j)), 1e-9);
        }
    }
}

}  // namespace
}  // namespace fqdyn
