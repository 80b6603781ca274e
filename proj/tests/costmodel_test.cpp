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
#include <numbers>

#include "fqdyn/costmodel.hpp"

namespace fqdyn::cost {
namespace {

CostQuery query(double n, double eta, double t = 1.0) {
  CostQuery q;
  q.n = n;
  q.eta = eta;
  q.t = t;
  q.epsilon = 0.1;
  return q;
}

/// Lattice sum by shells: counts points with |nu|^2 = s.
double shell_lambda(int m) {
  const int h = (m - 1) / 2;
  std::map<int, int> shells;
  for (int x = -h; x <= h; ++x)
    for (int y = -h; y <= h; ++y)
      for (int z = -h; z <= h; ++z) ++shells[x * x + y * y + z * z];
  double s = 0.0;
  for (auto [r2, count] : shells)
    if (r2 > 0) s += static_cast<double>(count) / r2;
  return s;
}

TEST(Classical, MeanFieldExamples) {
  const double eta = 7.0;
  // N = eta: eta^{11/3} t + eta^3 t; the two terms only coincide at N = eta^3
  EXPECT_NEAR(classical_mf_cost(query(eta, eta, 1.5)), (std::pow(eta, 11.0 / 3) + std::pow(eta, 3)) * 1.5, 1e-9);
  EXPECT_NEAR(classical_mf_cost(query(std::pow(eta, 3), eta, 1.5)), 2 * std::pow(eta, 19.0 / 3) * 1.5,
              1e-9 * std::pow(eta, 19.0 / 3));
  EXPECT_DOUBLE_EQ(classical_mf_cost(query(300, 20, 2.0)), 2 * classical_mf_cost(query(300, 20, 1.0)));
  const double term1 = std::pow(1e6, 4.0 / 3) * std::pow(1e2, 7.0 / 3);
  EXPECT_NEAR(term1 / 1e12, 4.64, 0.005);
}

TEST(Classical, FiniteTemperatureVariants) {
  auto q = query(1000, 10);
  EXPECT_THROW(classical_finite_t_density_cost(q), MissingM);
  q.m = 40;
  const double expect = std::pow(1000, 4.0 / 3) * 1600 * std::cbrt(10.0) + std::pow(1000, 5.0 / 3) * 1600 / std::pow(10, 2.0 / 3);
  EXPECT_NEAR(classical_finite_t_density_cost(q) / expect, 1.0, 1e-12);
  EXPECT_NEAR(classical_sampled_trajectories_cost(q), classical_mf_cost(q) * 100, 1e-3);
  q.m = 2000;
  EXPECT_THROW(q.validate(), ValidationError);
}

TEST(Quantum, Crossovers) {
  const double eta = 13.0;
  // alpha = 4: second first-quantized Trotter term equals interaction picture
  {
    auto q = query(std::pow(eta, 4), eta);
    double second = std::pow(q.n, 2.0 / 3) * std::pow(eta, 4.0 / 3);
    EXPECT_NEAR(second / interaction_picture_cost(q), 1.0, 1e-12);
  }
  // alpha = 2: leading first-quantized Trotter term equals leading second-quantized term
  {
    auto q = query(eta * eta, eta);
    double fq1 = std::cbrt(q.n) * std::pow(eta, 7.0 / 3);
    double sq1 = std::pow(q.n, 4.0 / 3) * std::cbrt(eta);
    EXPECT_NEAR(fq1 / sq1, 1.0, 1e-12);
  }
  // alpha = 3: the two first-quantized Trotter terms cross
  {
    auto q = query(std::pow(eta, 3), eta);
    EXPECT_NEAR(std::cbrt(q.n) * std::pow(eta, 7.0 / 3) / (std::pow(q.n, 2.0 / 3) * std::pow(eta, 4.0 / 3)), 1.0,
                1e-12);
  }
}

TEST(Quantum, LinearInTimeAndHypotheticalFlag) {
  auto a = quantum_costs(query(5000, 12, 1.0));
  auto b = quantum_costs(query(5000, 12, 3.0));
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t e = 0; e < a.size(); ++e) EXPECT_NEAR(b[e].value / a[e].value, 3.0, 1e-12);
  EXPECT_TRUE(a[3].hypothetical);
  EXPECT_EQ(a[3].name, "fast multipole");
}

TEST(Quantum, MonotoneInInputs) {
  for (double n : {100.0, 1000.0})
    for (double eta : {4.0, 9.0}) {
      auto base = quantum_costs(query(n, eta));
      auto bigger_n = quantum_costs(query(2 * n, eta));
      auto bigger_t = quantum_costs(query(n, eta, 2.0));
      for (std::size_t e = 0; e < base.size(); ++e) {
        EXPECT_GT(bigger_n[e].value, base[e].value);
        EXPECT_GT(bigger_t[e].value, base[e].value);
      }
      EXPECT_GT(classical_mf_cost(query(n, 2 * eta)), classical_mf_cost(query(n, eta)));
    }
}

TEST(Exponents, ContinuityAndValues) {
  EXPECT_NEAR(beta_classical(3.0), 19.0 / 3, 1e-12);
  EXPECT_NEAR((4.0 * 3 + 7) / 3, (5.0 * 3 + 4) / 3, 1e-12);
  for (double a : {2.0, 3.0, 4.0}) {
    EXPECT_NEAR(beta_quantum(a - 1e-13), beta_quantum(a), 1e-12);
    EXPECT_NEAR(beta_quantum(a + 1e-13), beta_quantum(a), 1e-12);
    EXPECT_NEAR(beta_classical(a - 1e-13), beta_classical(a + 1e-13), 1e-12);
  }
  EXPECT_NEAR(beta_quantum(2.0), 3.0, 1e-12);
  EXPECT_NEAR(beta_quantum(4.0), 4.0, 1e-12);
  EXPECT_THROW(beta_exponents(0.5), ValidationError);
}

TEST(Exponents, Speedup) {
  EXPECT_NEAR(speedup_exponent(1.0), 11.0 / 5, 1e-12);
  EXPECT_NEAR(speedup_exponent(2.0), 5.0 / 3, 1e-12);
  EXPECT_NEAR(speedup_exponent(4.0), 2.0, 1e-12);
  EXPECT_NEAR(speedup_exponent(1.25), 2.0, 1e-12);
  // branches adjacent to alpha = 4
  EXPECT_NEAR((5.0 * 4 + 4) / (2.0 * 4 + 4), 2.0, 1e-12);
  EXPECT_NEAR((5.0 * 4 + 4) / (4.0 + 8), 2.0, 1e-12);
  for (double a = 1.0; a <= 10.0; a += 0.01) {
    if (std::abs(a - 1.25) < 1e-9 || std::abs(a - 4.0) < 1e-9) continue;
    EXPECT_EQ(speedup_exponent(a) > 2.0, a < 1.25 || a > 4.0) << a;
  }
}

TEST(Regimes, LabelsAndTable) {
  EXPECT_EQ(regime_label(1.5), "second quantized Trotter");
  EXPECT_EQ(regime_label(2.5), "first quantized Trotter (N^{1/3}η^{7/3} regime)");
  EXPECT_EQ(regime_label(3.5), "first quantized Trotter (N^{2/3}η^{4/3} regime)");
  EXPECT_EQ(regime_label(4.0), "qubitization");
  EXPECT_EQ(regime_label(5.0), "interaction picture");
  auto rows = regime_table(1.0, 8.0, 0.25);
  ASSERT_EQ(rows.size(), 29u);
  EXPECT_DOUBLE_EQ(rows.back().alpha, 8.0);
  EXPECT_EQ(rows[4].optimal_quantum, "first quantized Trotter (N^{1/3}η^{7/3} regime)");
  EXPECT_EQ(rows[0].optimal_classical_term, "N^{4/3}η^{7/3}");
  EXPECT_EQ(rows.back().optimal_classical_term, "N^{5/3}η^{4/3}");
}

TEST(Report, OptimalAlgorithm) {
  auto r = cost_report(query(std::pow(10.0, 5), 10.0));
  EXPECT_EQ(r.optimal_quantum, "interaction picture");
  auto s = cost_report(query(std::pow(10.0, 1.5), 10.0));
  EXPECT_EQ(s.optimal_quantum, "second quantized Trotter");
  EXPECT_NEAR(s.alpha, 1.5, 1e-12);
}

TEST(Lambda, LatticeSum) {
  EXPECT_NEAR(lambda_nu(3), 44.0 / 3, 1e-12);
  EXPECT_LE(lambda_nu(3), 4 * std::numbers::pi * 3);
  for (int m = 3; m <= 31; m += 2) {
    EXPECT_NEAR(lambda_nu(m), shell_lambda(m), 1e-9 * shell_lambda(m));
    EXPECT_LE(lambda_nu(m), 4 * std::numbers::pi * m);
  }
  EXPECT_THROW(lambda_nu(4), ValidationError);
}

TEST(Lambda, Parameters) {
  LambdaParams p{8.0, 1, 3, {1.0}, 1.0};
  EXPECT_EQ(lambda_params(p).lambda_v, 0.0);
  LambdaParams q = p;
  q.charges = {1.0, 1.0};
  EXPECT_NEAR(lambda_params(q).lambda_u, 2 * lambda_params(p).lambda_u, 1e-12);
}

TEST(Lambda, InteractionPictureSteps) {
  LambdaParams p{8.0, 2, 3, {1.0, 1.0}, 1.0};
  const double lnu = shell_lambda(3);
  const double lu = 2 * 2 * lnu / (std::numbers::pi * 2.0);
  const double lv = 2 * 1 * lnu / (2 * std::numbers::pi * 2.0);
  const double expect = 3 * 10 * (lu + lv / 0.5) / std::log(2.0);
  EXPECT_NEAR(interaction_picture_steps(10.0, p), expect, 1e-9 * expect);
  EXPECT_NEAR(interaction_picture_steps(20.0, p), 2 * interaction_picture_steps(10.0, p), 1e-9);
  p.eta = 1;
  EXPECT_THROW(interaction_picture_steps(10.0, p), EtaTooSmall);
  EXPECT_NEAR(interaction_picture_overhead(), 1.592, 0.0005);
  EXPECT_NEAR(interaction_picture_overhead() * qubitization_steps(1.0, 5.0), 3 * 5 / std::log(2.0), 1e-12);
}

TEST(Measurement, Rows) {
  MeasurementInputs m;
  m.eta = 6;
  m.l = 10;
  m.epsilon = 0.1;
  m.c_samp = 2;
  m.lambda = 3;
  auto base = measurement_costs(m);
  ASSERT_EQ(base.size(), 3u);
  MeasurementInputs m4 = m;
  m4.l = 40;
  EXPECT_NEAR(measurement_costs(m4)[1].value / base[1].value, 2.0, 1e-12);
  MeasurementInputs m2 = m;
  m2.eta = 12;
  EXPECT_NEAR(measurement_costs(m2)[0].value / base[0].value, 2.0, 1e-12);
  EXPECT_NEAR(energy_lambda(1e6, 1e2), 1e2 * std::pow(10, 10.0 / 3) + 1e4 * std::pow(10, 2.0 / 3), 1e-6);
  EXPECT_NEAR(energy_lambda(1e6, 1e2) / 1e5, 2.62, 0.005);
  m.k = 0;
  EXPECT_THROW(measurement_costs(m), ValidationError);
}

}  // namespace
}  // namespace fqdyn::cost
