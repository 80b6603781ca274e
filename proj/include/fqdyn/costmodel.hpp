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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fqdyn/errors.hpp"

namespace fqdyn::cost {

/// Leading-order cost inputs. Suppressed (N t / eps)^{o(1)} and polylog
/// factors are taken as 1.
struct CostQuery {
  double n = 1.0;
  double eta = 1.0;
  double t = 1.0;
  double epsilon = 1.0;
  std::optional<double> m;        // finite-temperature occupied orbitals
  std::optional<double> l;        // time points
  std::optional<double> lambda;   // observable norm
  std::optional<double> c_samp;   // state preparation cost per sample
  std::optional<int> k;           // RDM order

  void validate() const {
    if (!(eta >= 1.0)) throw ValidationError("eta must be >= 1");
    if (!(n >= eta)) throw ValidationError("N must be >= eta");
    if (!(t > 0.0)) throw ValidationError("t must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0,1]");
    if (m && (!(*m > 0.0) || *m > n)) throw ValidationError("M must lie in (0, N]");
  }
};

inline double classical_mf_cost(const CostQuery& q) {
  return std::pow(q.n, 4.0 / 3) * std::pow(q.eta, 7.0 / 3) * q.t +
         std::pow(q.n, 5.0 / 3) * std::pow(q.eta, 4.0 / 3) * q.t;
}

inline double classical_finite_t_density_cost(const CostQuery& q) {
  if (!q.m) throw MissingM("finite-temperature density-matrix cost needs M");
  const double m2 = *q.m * *q.m;
  return std::pow(q.n, 4.0 / 3) * m2 * std::pow(q.eta, 1.0 / 3) * q.t +
         std::pow(q.n, 5.0 / 3) * m2 * q.t / std::pow(q.eta, 2.0 / 3);
}

inline double classical_sampled_trajectories_cost(const CostQuery& q) {
  return classical_mf_cost(q) / (q.epsilon * q.epsilon);
}

inline double fq_trotter_cost(const CostQuery& q) {
  return std::pow(q.n, 1.0 / 3) * std::pow(q.eta, 7.0 / 3) * q.t +
         std::pow(q.n, 2.0 / 3) * std::pow(q.eta, 4.0 / 3) * q.t;
}

inline double interaction_picture_cost(const CostQuery& q) {
  return std::pow(q.n, 1.0 / 3) * std::pow(q.eta, 8.0 / 3) * q.t;
}

inline double sq_trotter_cost(const CostQuery& q) {
  return std::pow(q.n, 4.0 / 3) * std::pow(q.eta, 1.0 / 3) * q.t +
         std::pow(q.n, 5.0 / 3) * q.t / std::pow(q.eta, 2.0 / 3);
}

inline double fmm_cost(const CostQuery& q) {
  return std::pow(q.n, 1.0 / 3) * std::pow(q.eta, 4.0 / 3) * q.t +
         std::pow(q.n, 2.0 / 3) * std::pow(q.eta, 1.0 / 3) * q.t;
}

struct CostEntry {
  std::string name;
  double value = 0.0;
  bool hypothetical = false;
};

struct CostReport {
  std::vector<CostEntry> classical;
  std::vector<CostEntry> quantum;
  double alpha = 0.0;
  std::string regime;
  std::string optimal_quantum;   // argmin over non-hypothetical quantum entries
  std::string optimal_classical_term;
  std::string suppressed_factors = "(N t / eps)^{o(1)} taken as 1";
};

inline std::vector<CostEntry> quantum_costs(const CostQuery& q) {
  return {{"first quantized Trotter", fq_trotter_cost(q), false},
          {"interaction picture", interaction_picture_cost(q), false},
          {"second quantized Trotter", sq_trotter_cost(q), false},
          {"fast multipole", fmm_cost(q), true}};
}

inline double beta_classical(double alpha) {
  return alpha <= 3.0 ? (4.0 * alpha + 7.0) / 3.0 : (5.0 * alpha + 4.0) / 3.0;
}

inline double beta_quantum(double alpha) {
  if (alpha <= 2.0) return (4.0 * alpha + 1.0) / 3.0;
  if (alpha <= 3.0) return (alpha + 7.0) / 3.0;
  if (alpha <= 4.0) return (2.0 * alpha + 4.0) / 3.0;
  return (alpha + 8.0) / 3.0;
}

struct BetaExponents {
  double classical;
  double quantum;
};

inline BetaExponents beta_exponents(double alpha) {
  if (!(alpha >= 1.0)) throw ValidationError("alpha must be >= 1");
  return {beta_classical(alpha), beta_quantum(alpha)};
}

inline double speedup_exponent(double alpha) {
  auto b = beta_exponents(alpha);
  return b.classical / b.quantum;
}

/// Best quantum algorithm for N = eta^alpha; boundaries 2 and 3 belong to
/// the upper interval, alpha = 4 is the qubitization crossover.
inline std::string regime_label(double alpha) {
  if (alpha < 2.0) return "second quantized Trotter";
  if (alpha < 3.0) return "first quantized Trotter (N^{1/3}η^{7/3} regime)";
  if (alpha < 4.0) return "first quantized Trotter (N^{2/3}η^{4/3} regime)";
  if (alpha == 4.0) return "qubitization";
  return "interaction picture";
}

inline std::string optimal_classical_term(double alpha) {
  return alpha <= 3.0 ? "N^{4/3}η^{7/3}" : "N^{5/3}η^{4/3}";
}

inline CostReport cost_report(const CostQuery& q) {
  q.validate();
  CostReport r;
  r.classical.push_back({"mean-field", classical_mf_cost(q), false});
  if (q.m) r.classical.push_back({"finite-T density matrix", classical_finite_t_density_cost(q), false});
  r.classical.push_back({"sampled trajectories", classical_sampled_trajectories_cost(q), false});
  r.quantum = quantum_costs(q);
  r.alpha = q.eta > 1.0 ? std::log(q.n) / std::log(q.eta) : 1.0;
  r.regime = regime_label(std::max(1.0, r.alpha));
  double best = INFINITY;
  for (const auto& e : r.quantum) {
    if (e.hypothetical) continue;
    if (e.value < best) {
      best = e.value;
      r.optimal_quantum = e.name;
    }
  }
  r.optimal_classical_term = optimal_classical_term(r.alpha);
  return r;
}

struct RegimeRow {
  double alpha;
  double beta_classical;
  double beta_quantum;
  double speedup;
  std::string optimal_quantum;
  std::string optimal_classical_term;
};

/// Rows at alpha = lo + i * step for i = 0 .. round((hi - lo) / step).
inline std::vector<RegimeRow> regime_table(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !(lo >= 1.0))
    throw ValidationError("alpha range needs 1 <= lo <= hi and step > 0");
  const auto count = static_cast<std::int64_t>(std::llround((hi - lo) / step));
  std::vector<RegimeRow> rows;
  for (std::int64_t i = 0; i <= count; ++i) {
    double a = lo + static_cast<double>(i) * step;
    auto b = beta_exponents(a);
    rows.push_back({a, b.classical, b.quantum, b.classical / b.quantum, regime_label(a),
                    optimal_classical_term(a)});
  }
  return rows;
}

struct LambdaParams {
  double omega = 1.0;
  int eta = 1;
  int points_per_axis = 3;  // N = points_per_axis^3
  std::vector<double> charges;
  double p_eq = 1.0;

  double n() const { return std::pow(static_cast<double>(points_per_axis), 3); }
  double total_charge() const {
    double z = 0.0;
    for (double c : charges) z += c;
    return z;
  }
};

struct LambdaValues {
  double lambda_nu = 0.0;
  double lambda_nu_bound = 0.0;
  double lambda_u = 0.0;
  double lambda_v = 0.0;
};

/// Sum over nonzero nu in [-(M-1)/2, (M-1)/2]^3 of 1/||nu||^2.
inline double lambda_nu(int points_per_axis) {
  if (points_per_axis < 1 || points_per_axis % 2 == 0)
    throw ValidationError("points_per_axis must be odd");
  const int h = (points_per_axis - 1) / 2;
  double s = 0.0;
  for (int x = -h; x <= h; ++x)
    for (int y = -h; y <= h; ++y)
      for (int z = -h; z <= h; ++z)
        if (x || y || z) s += 1.0 / (x * x + y * y + z * z);
  return s;
}

inline LambdaValues lambda_params(const LambdaParams& p) {
  if (!(p.omega > 0.0)) throw ValidationError("Omega must be positive");
  if (!(p.p_eq > 0.0 && p.p_eq <= 1.0)) throw ValidationError("P_eq must lie in (0,1]");
  LambdaValues v;
  v.lambda_nu = lambda_nu(p.points_per_axis);
  v.lambda_nu_bound = 4.0 * std::numbers::pi * std::cbrt(p.n());
  const double scale = std::numbers::pi * std::cbrt(p.omega);
  v.lambda_u = p.eta * p.total_charge() * v.lambda_nu / scale;
  v.lambda_v = p.eta * (p.eta - 1.0) * v.lambda_nu / (2.0 * scale);
  return v;
}

/// 3 T (lambda_U + lambda_V / (1 - 1/eta)) / (P_eq ln 2), O(1) term dropped.
inline double interaction_picture_steps(double t_unitless, const LambdaParams& p) {
  if (p.eta < 2) throw EtaTooSmall("interaction-picture step count needs eta >= 2");
  if (!(t_unitless > 0.0)) throw ValidationError("T must be positive");
  auto v = lambda_params(p);
  return 3.0 * t_unitless * (v.lambda_u + v.lambda_v / (1.0 - 1.0 / p.eta)) /
         (p.p_eq * std::numbers::ln2);
}

/// e lambda T walk steps for qubitization-based evolution.
inline double qubitization_steps(double t_unitless, double lambda) {
  return std::numbers::e * lambda * t_unitless;
}

/// Overhead of the interaction-picture step count per unit lambda T
/// relative to qubitization, 3/(e ln 2).
inline double interaction_picture_overhead() {
  return 3.0 / (std::numbers::e * std::numbers::ln2);
}

inline double energy_lambda(double n, double eta) {
  return std::cbrt(n) * std::pow(eta, 5.0 / 3) + std::pow(n, 2.0 / 3) * std::cbrt(eta);
}

struct MeasurementRow {
  std::string name;
  double value = 0.0;
};

struct MeasurementInputs {
  int k = 1;
  double eta = 1.0;
  double n = 1.0;
  double l = 1.0;
  double epsilon = 1.0;
  double c_samp = 1.0;
  double lambda = 1.0;
  double t = 1.0;
};

inline double shadows_measurement_cost(const MeasurementInputs& m) {
  return std::pow(m.k, m.k) * std::pow(m.eta, m.k) * m.l * m.c_samp / (m.epsilon * m.epsilon);
}

inline double gradient_measurement_cost(const MeasurementInputs& m) {
  return std::sqrt(m.l) * m.c_samp * m.lambda / m.epsilon;
}

inline double energy_measurement_cost(const MeasurementInputs& m) {
  return std::sqrt(m.l) * m.c_samp * m.t * energy_lambda(m.n, m.eta) / m.epsilon;
}

inline std::vector<MeasurementRow> measurement_costs(const MeasurementInputs& m) {
  if (m.k < 1 || !(m.epsilon > 0.0) || !(m.l > 0.0) || !(m.c_samp > 0.0))
    throw ValidationError("measurement costs need k >= 1 and positive L, eps, C");
  return {{"classical shadows", shadows_measurement_cost(m)},
          {"gradient measurement", gradient_measurement_cost(m)},
          {"energy (gradient)", energy_measurement_cost(m)}};
}

}  // namespace fqdyn::cost
