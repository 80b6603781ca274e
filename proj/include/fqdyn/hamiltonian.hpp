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
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/state.hpp"

namespace fqdyn {

struct NuclearConfig {
  std::vector<Vec3> positions;
  std::vector<int> charges;

  std::size_t size() const { return charges.size(); }
  bool empty() const { return charges.empty(); }

  void add(int charge, Vec3 position) {
    charges.push_back(charge);
    positions.push_back(position);
  }

  int total_charge() const {
    int z = 0;
    for (int c : charges) z += c;
    return z;
  }

  void validate() const {
    if (positions.size() != charges.size())
      throw DimensionMismatch("nuclear positions and charges differ in count");
    for (std::size_t l = 0; l < charges.size(); ++l) {
      if (charges[l] < 1) throw ValidationError("nuclear charges must be >= 1");
      for (double x : positions[l])
        if (!std::isfinite(x)) throw ValidationError("nuclear position is not finite");
    }
  }
};

/// 1/r, or 1/(r + s) when softened.
struct CoulombKernel {
  enum class Mode { bare, softened };
  Mode mode = Mode::bare;
  double shift = 0.0;

  static CoulombKernel bare() { return {}; }

  static CoulombKernel softened(double s) {
    if (!(s > 0.0)) throw ValidationError("softening shift must be positive");
    return {Mode::softened, s};
  }

  /// Softened kernel with cap V_max at zero separation.
  static CoulombKernel from_vmax(double v_max) { return softened(1.0 / v_max); }

  bool is_bare() const { return mode == Mode::bare; }

  double operator()(double r) const {
    if (mode == Mode::softened) return 1.0 / (r + shift);
    if (r == 0.0) throw SingularPotential("bare Coulomb kernel evaluated at zero distance");
    return 1.0 / r;
  }
};

struct EvolutionPlan {
  double total_time = 0.0;
  int steps = 1;
  int order = 2;

  void validate() const {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (order != 1 && order != 2 && order != 4)
      throw ValidationError("product-formula order must be 1, 2 or 4");
    if (!std::isfinite(total_time)) throw ValidationError("total time is not finite");
  }
};

/// ||k_p||^2 / 2 for every grid point.
inline RVector kinetic_phase_table(const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.num_points());
  RVector t(n);
  for (Eigen::Index p = 0; p < n; ++p) t(p) = 0.5 * norm2(grid.frequency(static_cast<std::size_t>(p)));
  return t;
}

/// Unitary centered DFT on the grid, F[nu][p] = prod_axes exp(-2 pi i c_nu c_p / M) / sqrt(M).
inline CMatrix centered_dft(const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.num_points());
  const int m = grid.points_per_axis;
  CMatrix f(n, n);
  for (Eigen::Index nu = 0; nu < n; ++nu) {
    Vec3 a = grid.lattice(static_cast<std::size_t>(nu));
    for (Eigen::Index p = 0; p < n; ++p) {
      Vec3 b = grid.lattice(static_cast<std::size_t>(p));
      double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      f(nu, p) = std::exp(-2.0 * std::numbers::pi * kI * dot / static_cast<double>(m));
    }
  }
  return f / std::pow(static_cast<double>(m), 0.5 * grid.dim);
}

/// Kinetic operator in the position basis, F^dagger diag(k^2/2) F.
inline CMatrix kinetic_matrix(const GridSpec& grid) {
  CMatrix f = centered_dft(grid);
  return f.adjoint() * kinetic_phase_table(grid).cast<cplx>().asDiagonal() * f;
}

/// Grid Hamiltonian H = T + U + V + nuclear repulsion on eta-register states.
class GridHamiltonian {
 public:
  GridHamiltonian(GridSpec grid, NuclearConfig nuclei = {},
                  CoulombKernel kernel = CoulombKernel::bare())
      : grid_(grid), nuclei_(std::move(nuclei)), kernel_(kernel) {
    grid_.validate();
    nuclei_.validate();
    const std::size_t n = grid_.num_points();
    dft_ = centered_dft(grid_);
    kinetic_ = kinetic_phase_table(grid_);
    one_body_.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      const Vec3 r = grid_.position(p);
      for (std::size_t l = 0; l < nuclei_.size(); ++l) {
        double d = distance(nuclei_.positions[l], r);
        if (kernel_.is_bare() && d == 0.0) {
          one_body_[p] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        one_body_[p] -= nuclei_.charges[l] * kernel_(d);
      }
    }
    pair_.assign(n * n, 0.0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        pair_[p * n + q] = (p == q && kernel_.is_bare())
                               ? std::numeric_limits<double>::quiet_NaN()
                               : kernel_(distance(grid_.position(p), grid_.position(q)));
  }

  const GridSpec& grid() const { return grid_; }
  const NuclearConfig& nuclei() const { return nuclei_; }
  const CoulombKernel& kernel() const { return kernel_; }
  const RVector& kinetic_table() const { return kinetic_; }
  const CMatrix& dft() const { return dft_; }
  double one_body(std::size_t p) const { return one_body_[p]; }

  /// Pair interaction; NaN for coincident points under the bare kernel.
  /// one_body() is likewise NaN on a grid point occupied by a nucleus.
  double pair(std::size_t p, std::size_t q) const { return pair_[p * grid_.num_points() + q]; }

  double nuclear_repulsion() const {
    double e = 0.0;
    for (std::size_t a = 0; a < nuclei_.size(); ++a)
      for (std::size_t b = a + 1; b < nuclei_.size(); ++b)
        e += nuclei_.charges[a] * nuclei_.charges[b] /
             distance(nuclei_.positions[a], nuclei_.positions[b]);
    return e;
  }

  /// U + V at one configuration (p_1, ..., p_eta); NaN if singular.
  double potential_value(std::span<const std::size_t> cfg) const {
    double v = 0.0;
    for (std::size_t a = 0; a < cfg.size(); ++a) {
      v += one_body_[cfg[a]];
      for (std::size_t b = a + 1; b < cfg.size(); ++b) v += pair(cfg[a], cfg[b]);
    }
    return v;
  }

  /// U + V on every amplitude index of an eta-register state. Padding
  /// indices get 0; singular configurations get NaN.
  std::vector<double> potential_diagonal(int eta) const {
    FirstQuantizedState shape(grid_, eta);
    std::vector<double> diag(shape.size(), 0.0);
    std::vector<std::size_t> cfg(eta);
    for (std::size_t i = 0; i < diag.size(); ++i) {
      shape.decode(i, cfg);
      bool padded = false;
      for (auto p : cfg) padded |= (p >= grid_.num_points());
      if (!padded) diag[i] = potential_value(cfg);
    }
    return diag;
  }

  /// exp(-i T dt) on one register, identity on padding values.
  CMatrix kinetic_propagator(double dt, std::size_t register_dim) const {
    const auto n = static_cast<Eigen::Index>(grid_.num_points());
    CVector phases(n);
    for (Eigen::Index p = 0; p < n; ++p) phases(p) = std::exp(-kI * kinetic_(p) * dt);
    CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(register_dim),
                                  static_cast<Eigen::Index>(register_dim));
    u.topLeftCorner(n, n) = dft_.adjoint() * phases.asDiagonal() * dft_;
    return u;
  }

  CMatrix kinetic_operator(std::size_t register_dim) const {
    const auto n = static_cast<Eigen::Index>(grid_.num_points());
    CMatrix t = CMatrix::Zero(static_cast<Eigen::Index>(register_dim),
                              static_cast<Eigen::Index>(register_dim));
    t.topLeftCorner(n, n) = dft_.adjoint() * kinetic_.cast<cplx>().asDiagonal() * dft_;
    return t;
  }

  void apply_kinetic_evolution(FirstQuantizedState& s, double dt) const {
    check_grid(s);
    const bool flag = s.antisymmetric();
    CMatrix u = kinetic_propagator(dt, s.register_dim());
    for (int j = 0; j < s.eta(); ++j) apply_register_operator(s, j, u);
    s.set_antisymmetric(flag);
  }

  void apply_potential_evolution(FirstQuantizedState& s, double dt,
                                 const std::vector<double>& diag) const {
    if (diag.size() != s.size()) throw DimensionMismatch("potential diagonal size");
    auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (std::isnan(diag[i])) {
        if (std::abs(amps[i]) > kSingularTolerance)
          throw SingularPotential("bare Coulomb singularity carries amplitude");
        amps[i] = 0.0;
        continue;
      }
      amps[i] *= std::exp(-kI * diag[i] * dt);
    }
  }

  void apply_potential_evolution(FirstQuantizedState& s, double dt) const {
    check_grid(s);
    apply_potential_evolution(s, dt, potential_diagonal(s.eta()));
  }

  /// Product-formula approximation of exp(-i H t)|psi>.
  FirstQuantizedState evolve(const FirstQuantizedState& in, const EvolutionPlan& plan) const {
    plan.validate();
    check_grid(in);
    FirstQuantizedState s = in;
    const auto diag = potential_diagonal(s.eta());
    const double dt = plan.total_time / plan.steps;
    const std::size_t d = s.register_dim();
    const bool flag = s.antisymmetric();

    auto kinetic = [&](const CMatrix& u) {
      for (int j = 0; j < s.eta(); ++j) apply_register_operator(s, j, u);
    };
    auto strang = [&](double h, const CMatrix& u) {
      apply_potential_evolution(s, 0.5 * h, diag);
      kinetic(u);
      apply_potential_evolution(s, 0.5 * h, diag);
    };

    if (plan.order == 1) {
      CMatrix u = kinetic_propagator(dt, d);
      for (int k = 0; k < plan.steps; ++k) {
        apply_potential_evolution(s, dt, diag);
        kinetic(u);
      }
    } else if (plan.order == 2) {
      CMatrix u = kinetic_propagator(dt, d);
      for (int k = 0; k < plan.steps; ++k) strang(dt, u);
    } else {
      const double p = 1.0 / (4.0 - std::cbrt(4.0));
      CMatrix u_outer = kinetic_propagator(p * dt, d);
      CMatrix u_inner = kinetic_propagator((1.0 - 4.0 * p) * dt, d);
      for (int k = 0; k < plan.steps; ++k) {
        strang(p * dt, u_outer);
        strang(p * dt, u_outer);
        strang((1.0 - 4.0 * p) * dt, u_inner);
        strang(p * dt, u_outer);
        strang(p * dt, u_outer);
      }
    }
    s.set_antisymmetric(flag);
    return s;
  }

  double kinetic_energy(const FirstQuantizedState& s) const {
    check_grid(s);
    CMatrix t = kinetic_operator(s.register_dim());
    double e = 0.0;
    for (int j = 0; j < s.eta(); ++j) {
      FirstQuantizedState ts = s;
      apply_register_operator(ts, j, t);
      e += inner_product(s, ts).real();
    }
    return e;
  }

  double potential_energy(const FirstQuantizedState& s) const {
    check_grid(s);
    std::vector<std::size_t> cfg(s.eta());
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      double w = std::norm(s[i]);
      if (w == 0.0) continue;
      s.decode(i, cfg);
      bool padded = false;
      for (auto p : cfg) padded |= (p >= grid_.num_points());
      if (padded) continue;
      double v = potential_value(cfg);
      if (std::isnan(v)) {
        if (std::sqrt(w) > kSingularTolerance)
          throw SingularPotential("bare Coulomb singularity carries amplitude");
        continue;
      }
      e += w * v;
    }
    return e;
  }

  double total_energy(const FirstQuantizedState& s) const {
    return kinetic_energy(s) + potential_energy(s) + nuclear_repulsion();
  }

  static constexpr double kSingularTolerance = 1e-12;

 private:
  void check_grid(const FirstQuantizedState& s) const {
    if (!(s.grid() == grid_)) throw DimensionMismatch("state grid differs from Hamiltonian grid");
  }

  GridSpec grid_;
  NuclearConfig nuclei_;
  CoulombKernel kernel_;
  CMatrix dft_;
  RVector kinetic_;
  std::vector<double> one_body_;
  std::vector<double> pair_;
};

}  // namespace fqdyn
