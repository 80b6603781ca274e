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

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "fqdyn/errors.hpp"

namespace fqdyn {

using Vec3 = std::array<double, 3>;

/// Real-space grid of points_per_axis^dim points in a cubic cell of volume
/// cell_volume.
///
/// Axis indices i in [0, M) map to centered coordinates c = i - (M-1)/2, so
/// the index set is symmetric about zero. For odd M the coordinates are
/// integers and c = 0 is a grid point; for even M they are half-integers.
/// Grid points are r = c * L / M and frequencies k = 2 pi c / L, with
/// L = cell_volume^(1/dim). Flat indices put axis 0 most significant.
struct GridSpec {
  int dim = 1;
  int points_per_axis = 1;
  double cell_volume = 1.0;

  static GridSpec make(int dim, int points_per_axis, double cell_volume) {
    GridSpec g{dim, points_per_axis, cell_volume};
    g.validate();
    return g;
  }

  void validate() const {
    if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
    if (points_per_axis < 1) throw ValidationError("points_per_axis must be positive");
    if (!(cell_volume > 0.0) || !std::isfinite(cell_volume))
      throw ValidationError("cell volume must be positive and finite");
  }

  std::size_t num_points() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points_per_axis);
    return n;
  }

  double box_length() const { return std::pow(cell_volume, 1.0 / dim); }
  double spacing() const { return box_length() / points_per_axis; }

  double centered(int axis_index) const {
    return axis_index - 0.5 * (points_per_axis - 1);
  }

  std::array<int, 3> axis_indices(std::size_t p) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(p % points_per_axis);
      p /= points_per_axis;
    }
    return idx;
  }

  std::size_t flat_index(const std::array<int, 3>& idx) const {
    std::size_t p = 0;
    for (int a = 0; a < dim; ++a) p = p * points_per_axis + idx[a];
    return p;
  }

  /// Centered integer/half-integer lattice vector of point p.
  Vec3 lattice(std::size_t p) const {
    auto idx = axis_indices(p);
    Vec3 v{0, 0, 0};
    for (int a = 0; a < dim; ++a) v[a] = centered(idx[a]);
    return v;
  }

  Vec3 position(std::size_t p) const {
    Vec3 v = lattice(p);
    double scale = spacing();
    for (auto& x : v) x *= scale;
    return v;
  }

  Vec3 frequency(std::size_t p) const {
    Vec3 v = lattice(p);
    double scale = 2.0 * std::numbers::pi / box_length();
    for (auto& x : v) x *= scale;
    return v;
  }

  /// Flat index of the point with negated lattice vector.
  std::size_t mirror(std::size_t p) const {
    auto idx = axis_indices(p);
    for (int a = 0; a < dim; ++a) idx[a] = points_per_axis - 1 - idx[a];
    return flat_index(idx);
  }

  bool operator==(const GridSpec&) const = default;
};

inline double norm2(const Vec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

inline double distance(const Vec3& a, const Vec3& b) {
  Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  return std::sqrt(norm2(d));
}

}  // namespace fqdyn
