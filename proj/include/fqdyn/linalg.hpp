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

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "fqdyn/random.hpp"

namespace fqdyn {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// exp(-i H t) for Hermitian H, via the eigendecomposition of H.
inline CMatrix hermitian_propagator(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const CMatrix& v = eig.eigenvectors();
  CVector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phases(i) = std::exp(-kI * eig.eigenvalues()(i) * t);
  }
  return v * phases.asDiagonal() * v.adjoint();
}

/// Max-entry deviation of U^dagger U from the identity.
inline double unitarity_deviation(const CMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

/// Max-entry deviation of C^dagger C from the identity (orthonormal columns).
inline double orthonormality_deviation(const CMatrix& c) {
  if (c.cols() == 0) return 0.0;
  CMatrix d = c.adjoint() * c - CMatrix::Identity(c.cols(), c.cols());
  return d.cwiseAbs().maxCoeff();
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix
/// with the phases of R's diagonal folded back into Q.
inline CMatrix random_unitary(Eigen::Index dim, RngStream& rng) {
  CMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    cplx d = r(i, i);
    double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

/// N x eta matrix with Haar-distributed orthonormal columns.
inline CMatrix random_orthonormal_columns(Eigen::Index rows, Eigen::Index cols,
                                          RngStream& rng) {
  return random_unitary(rows, rng).leftCols(cols);
}

/// Frobenius distance between the column-space projectors of a and b.
inline double projector_distance(const CMatrix& a, const CMatrix& b) {
  CMatrix pa = a * a.adjoint();
  CMatrix pb = b * b.adjoint();
  return (pa - pb).norm();
}

}  // namespace fqdyn
