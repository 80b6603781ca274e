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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fqdyn/clifford.hpp"
#include "fqdyn/combinatorics.hpp"
#include "fqdyn/errors.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/random.hpp"
#include "fqdyn/state.hpp"

namespace fqdyn {

/// Variance bound e^3 eta^k (2k + 2e)^k of the single-shot estimator.
inline double variance_bound(int k, int eta) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (eta < 2 * k)
    throw AssumptionViolated("variance bound needs eta >= 2k (k=" + std::to_string(k) +
                             ", eta=" + std::to_string(eta) + ")");
  const double e = std::numbers::e;
  return e * e * e * std::pow(eta, k) * std::pow(2.0 * k + 2.0 * e, k);
}

/// 64 e^3 ln(N/delta) k (2k + 2e)^k eta^k / eps^2 before rounding up.
inline double required_samples_real(double n, int k, int eta, double epsilon, double delta) {
  if (!(n > 0) || k < 1 || eta < 1 || !(epsilon > 0) || !(delta > 0) || delta >= 1)
    throw ValidationError("required_samples needs positive N, k, eta, epsilon and delta in (0,1)");
  const double e = std::numbers::e;
  return 64.0 * e * e * e * std::log(n / delta) * k * std::pow(2.0 * k + 2.0 * e, k) *
         std::pow(eta, k) / (epsilon * epsilon);
}

inline std::uint64_t required_samples(double n, int k, int eta, double epsilon, double delta) {
  return static_cast<std::uint64_t>(std::ceil(required_samples_real(n, k, eta, epsilon, delta)));
}

struct EstimatorConfig {
  int k = 1;
  double epsilon = 0.1;
  double delta = 0.05;
  std::uint64_t groups = 1;      // K
  std::uint64_t group_size = 1;  // b
  const char* log_convention = "natural";

  static std::uint64_t groups_for(double delta) {
    if (!(delta > 0) || delta >= 1) throw ValidationError("delta must lie in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta)));
  }

  /// K = ceil(8 ln(1/delta)), b = ceil(4 VarBound / eps^2).
  static EstimatorConfig automatic(int k, int eta, double epsilon, double delta) {
    EstimatorConfig c{k, epsilon, delta, groups_for(delta), 1};
    c.group_size =
        static_cast<std::uint64_t>(std::ceil(4.0 * variance_bound(k, eta) / (epsilon * epsilon)));
    return c;
  }

  /// K = ceil(8 ln(1/delta)), b = floor(m / K).
  static EstimatorConfig for_samples(int k, std::uint64_t m, double epsilon, double delta) {
    EstimatorConfig c{k, epsilon, delta, groups_for(delta), 0};
    c.group_size = m / c.groups;
    if (c.group_size == 0)
      throw InsufficientSamples(std::to_string(m) + " samples cannot fill " +
                                std::to_string(c.groups) + " groups");
    return c;
  }

  std::uint64_t samples_needed() const { return groups * group_size; }
};

/// R_k: one register from each of k consecutive blocks of size eta'/k,
/// eta' = k floor(eta/k), optionally through a register relabeling.
class RestrictedIndexSet {
 public:
  RestrictedIndexSet(int k, int eta, std::vector<int> relabel = {})
      : k_(k), eta_(eta), relabel_(std::move(relabel)) {
    if (k < 1 || k > eta) throw ValidationError("need 1 <= k <= eta");
    eta_prime_ = k * (eta / k);
    block_ = eta_prime_ / k;
    if (relabel_.empty()) {
      relabel_.resize(eta);
      std::iota(relabel_.begin(), relabel_.end(), 0);
    }
    if (static_cast<int>(relabel_.size()) != eta)
      throw DimensionMismatch("relabeling must list every register");
    std::vector<int> check = relabel_;
    std::sort(check.begin(), check.end());
    for (int r = 0; r < eta; ++r)
      if (check[r] != r) throw ValidationError("relabeling is not a permutation");
    build();
  }

  int k() const { return k_; }
  int eta_prime() const { return eta_prime_; }
  int block_size() const { return block_; }
  std::size_t size() const { return tuples_.size(); }
  const std::vector<std::vector<int>>& tuples() const { return tuples_; }

  bool contains(const std::vector<int>& x) const {
    return std::find(tuples_.begin(), tuples_.end(), x) != tuples_.end();
  }

 private:
  void build() {
    std::vector<int> digits(k_, 0);
    while (true) {
      std::vector<int> x(k_);
      for (int l = 0; l < k_; ++l) x[l] = relabel_[l * block_ + digits[l]];
      tuples_.push_back(std::move(x));
      int l = k_ - 1;
      while (l >= 0 && ++digits[l] == block_) digits[l--] = 0;
      if (l < 0) break;
    }
  }

  int k_, eta_, eta_prime_ = 0, block_ = 0;
  std::vector<int> relabel_;
  std::vector<std::vector<int>> tuples_;
};

/// eta! / ((eta - k)! |R_k|); reduces to k^k eta! / (eta^k (eta - k)!) when k | eta.
inline double krdm_coefficient(int k, int eta) {
  RestrictedIndexSet r(k, eta);
  return falling_factorial(eta, k) / static_cast<double>(r.size());
}

struct ShadowSample {
  std::vector<std::uint64_t> clifford_ids;
  std::vector<std::size_t> outcomes;
};

/// Collected samples plus, for each sample and register, the row
/// <b_j| U_j of the applied Clifford.
struct ShadowData {
  int n = 1;
  int eta = 1;
  std::vector<ShadowSample> samples;
  std::vector<cplx> rows;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return std::size_t{1} << n; }

  const cplx* row(std::size_t sample, int reg) const {
    return rows.data() + (sample * eta + static_cast<std::size_t>(reg)) * dim();
  }
};

/// Draws the eta Clifford ids for one sample.
using CliffordSampler = std::function<std::uint64_t(int n, RngStream& rng)>;

inline constexpr std::size_t kShadowChunk = 1024;

namespace detail {

inline void collect_chunk(const FirstQuantizedState& state, std::size_t first, std::size_t count,
                          std::uint64_t seed, std::uint64_t chunk, const CliffordSampler& sampler,
                          ShadowData& out) {
  RngStream rng(seed, "shadows", chunk);
  const int n = state.qubits_per_register();
  const int eta = state.eta();
  const std::size_t dim = state.register_dim();
  FirstQuantizedState work = state;
  std::vector<CMatrix> us(eta);
  std::vector<double> probs(state.size());
  std::vector<std::size_t> cfg(eta);
  for (std::size_t s = first; s < first + count; ++s) {
    ShadowSample& sample = out.samples[s];
    sample.clifford_ids.resize(eta);
    for (int j = 0; j < eta; ++j) {
      sample.clifford_ids[j] = sampler ? sampler(n, rng) : sample_clifford_id(n, rng);
      us[j] = clifford_unitary(sample.clifford_ids[j], n);
    }
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), work.amplitudes().begin());
    for (int j = 0; j < eta; ++j) apply_register_operator(work, j, us[j]);
    double total = 0.0;
    for (std::size_t a = 0; a < work.size(); ++a) total += (probs[a] = std::norm(work[a]));
    work.decode(sample_index(probs, total, rng), cfg);
    sample.outcomes = cfg;
    for (int j = 0; j < eta; ++j) {
      cplx* dst = out.rows.data() + (s * eta + j) * dim;
      for (std::size_t c = 0; c < dim; ++c)
        dst[c] = us[j](static_cast<Eigen::Index>(cfg[j]), static_cast<Eigen::Index>(c));
    }
  }
}

}  // namespace detail

/// m independent samples: a fresh copy of the state, an independent Clifford
/// on every register, then one joint computational-basis measurement.
/// Chunk c of 1024 samples draws from stream (seed, "shadows", c), so the
/// output does not depend on the thread count.
inline ShadowData collect_shadows(const FirstQuantizedState& state, std::size_t m,
                                  std::uint64_t seed, int threads = 1,
                                  const CliffordSampler& sampler = {}) {
  ShadowData out;
  out.n = state.qubits_per_register();
  out.eta = state.eta();
  if (out.n < 1) throw ValidationError("registers must hold at least one qubit");
  out.samples.resize(m);
  out.rows.resize(m * static_cast<std::size_t>(out.eta) * out.dim());
  if (m == 0) return out;
  if (out.n <= 2) clifford_table(out.n);  // build the cache before threads start
  const std::size_t chunks = (m + kShadowChunk - 1) / kShadowChunk;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      std::size_t first = c * kShadowChunk;
      detail::collect_chunk(state, first, std::min(kShadowChunk, m - first), seed, c, sampler,
                            out);
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return out;
}

/// Single-register factor (2^n + 1) <j|U^dagger|b><b|U|i> - delta_ij, given row = <b|U.
inline cplx snapshot_factor(const cplx* row, std::size_t dim, std::size_t i, std::size_t j) {
  cplx v = static_cast<double>(dim + 1) * std::conj(row[j]) * row[i];
  if (i == j) v -= 1.0;
  return v;
}

inline cplx snapshot_term_estimate(const ShadowData& data, std::size_t sample,
                                   const std::vector<int>& x, const std::vector<std::size_t>& i,
                                   const std::vector<std::size_t>& j) {
  if (x.size() != i.size() || x.size() != j.size())
    throw DimensionMismatch("tuple lengths differ");
  if (sample >= data.size()) throw IndexOutOfRange("sample index out of range");
  cplx v = 1.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (x[l] < 0 || x[l] >= data.eta) throw IndexOutOfRange("register index out of range");
    if (i[l] >= data.dim() || j[l] >= data.dim()) throw IndexOutOfRange("orbital out of range");
    v *= snapshot_factor(data.row(sample, x[l]), data.dim(), i[l], j[l]);
  }
  return v;
}

/// Per-sample values of the k-RDM estimator d-hat for element (i, j).
inline std::vector<cplx> single_shot_values(const ShadowData& data, const RestrictedIndexSet& r,
                                            const std::vector<std::size_t>& i,
                                            const std::vector<std::size_t>& j) {
  if (static_cast<int>(i.size()) != r.k() || static_cast<int>(j.size()) != r.k())
    throw DimensionMismatch("orbital tuples must have length k");
  for (auto v : i)
    if (v >= data.dim()) throw IndexOutOfRange("orbital out of range");
  for (auto v : j)
    if (v >= data.dim()) throw IndexOutOfRange("orbital out of range");
  const double coeff = falling_factorial(data.eta, r.k()) / static_cast<double>(r.size());
  std::vector<cplx> out(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    cplx acc{};
    for (const auto& x : r.tuples()) {
      cplx v = 1.0;
      for (int l = 0; l < r.k(); ++l) v *= snapshot_factor(data.row(s, x[l]), data.dim(), i[l], j[l]);
      acc += v;
    }
    out[s] = coeff * acc;
  }
  return out;
}

inline double lower_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

/// Coordinatewise lower median of K group means of b consecutive values.
inline cplx median_of_means(const std::vector<cplx>& values, std::uint64_t groups,
                            std::uint64_t group_size) {
  if (groups == 0 || group_size == 0) throw ValidationError("K and b must be positive");
  if (values.size() < groups * group_size)
    throw InsufficientSamples("need K*b = " + std::to_string(groups * group_size) +
                              " samples, have " + std::to_string(values.size()));
  std::vector<double> re(groups), im(groups);
  for (std::uint64_t g = 0; g < groups; ++g) {
    cplx s{};
    for (std::uint64_t t = 0; t < group_size; ++t) s += values[g * group_size + t];
    s /= static_cast<double>(group_size);
    re[g] = s.real();
    im[g] = s.imag();
  }
  return {lower_median(re), lower_median(im)};
}

struct ShadowEstimate {
  cplx value;
  std::uint64_t groups = 0;
  std::uint64_t group_size = 0;
};

/// Single-shot values for (i, j) and their median of means. The lower median
/// is not odd-symmetric, so the canonical ordering of (i, j) is evaluated and
/// conjugated for the other one; this keeps the estimate exactly Hermitian.
inline std::pair<ShadowEstimate, std::vector<cplx>> estimate_with_values(
    const ShadowData& data, const RestrictedIndexSet& r, const std::vector<std::size_t>& i,
    const std::vector<std::size_t>& j, std::uint64_t groups, std::uint64_t group_size) {
  const bool swap = j < i;
  auto values = swap ? single_shot_values(data, r, j, i) : single_shot_values(data, r, i, j);
  cplx v = median_of_means(values, groups, group_size);
  if (swap) {
    v = std::conj(v);
    for (auto& x : values) x = std::conj(x);
  }
  return {{v, groups, group_size}, std::move(values)};
}

inline ShadowEstimate estimate_krdm_element(const ShadowData& data, const EstimatorConfig& config,
                                            const std::vector<std::size_t>& i,
                                            const std::vector<std::size_t>& j,
                                            const std::vector<int>& relabel = {}) {
  RestrictedIndexSet r(config.k, data.eta, relabel);
  if (data.size() < config.samples_needed())
    throw InsufficientSamples("need K*b = " + std::to_string(config.samples_needed()) +
                              " samples, have " + std::to_string(data.size()));
  return estimate_with_values(data, r, i, j, config.groups, config.group_size).first;
}

inline cplx sample_mean(const std::vector<cplx>& v) {
  cplx s{};
  for (const auto& x : v) s += x;
  return v.empty() ? s : s / static_cast<double>(v.size());
}

/// Unbiased sample variance E|d - E d|^2.
inline double sample_variance(const std::vector<cplx>& v) {
  if (v.size() < 2) return 0.0;
  cplx m = sample_mean(v);
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x - m);
  return s / static_cast<double>(v.size() - 1);
}

struct KrdmElement {
  std::vector<std::size_t> i;
  std::vector<std::size_t> j;
};

/// Exact mean of d-hat: uniform average over every Clifford tuple and the
/// Born distribution of outcomes. Limited to |Cl(n)|^eta <= 2^20.
inline std::vector<cplx> exhaustive_estimator_mean(const FirstQuantizedState& state, int k,
                                                   const std::vector<KrdmElement>& elements,
                                                   const std::vector<int>& relabel = {}) {
  const int n = state.qubits_per_register();
  const int eta = state.eta();
  if (n < 1 || n > 2) throw EnumerationUnavailable("exhaustive average needs n <= 2");
  const auto& table = clifford_table(n);
  const double tuples = std::pow(static_cast<double>(table.size()), eta);
  if (tuples > 1048576.0) throw EnumerationUnavailable("too many Clifford tuples to enumerate");
  RestrictedIndexSet r(k, eta, relabel);
  const double coeff = falling_factorial(eta, k) / static_cast<double>(r.size());
  const std::size_t dim = state.register_dim();

  std::vector<cplx> acc(elements.size(), cplx{});
  std::vector<std::size_t> choice(eta, 0);
  std::vector<std::size_t> cfg(eta);
  FirstQuantizedState work = state;
  while (true) {
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), work.amplitudes().begin());
    for (int q = 0; q < eta; ++q) apply_register_operator(work, q, table[choice[q]]);
    for (std::size_t b = 0; b < work.size(); ++b) {
      double p = std::norm(work[b]);
      if (p == 0.0) continue;
      work.decode(b, cfg);
      for (std::size_t e = 0; e < elements.size(); ++e) {
        cplx est{};
        for (const auto& x : r.tuples()) {
          cplx v = 1.0;
          for (int l = 0; l < k; ++l) {
            const CMatrix& u = table[choice[x[l]]];
            cplx row_i = u(static_cast<Eigen::Index>(cfg[x[l]]), static_cast<Eigen::Index>(elements[e].i[l]));
            cplx row_j = u(static_cast<Eigen::Index>(cfg[x[l]]), static_cast<Eigen::Index>(elements[e].j[l]));
            cplx f = static_cast<double>(dim + 1) * std::conj(row_j) * row_i;
            if (elements[e].i[l] == elements[e].j[l]) f -= 1.0;
            v *= f;
          }
          est += v;
        }
        acc[e] += p * coeff * est;
      }
    }
    int q = eta - 1;
    while (q >= 0 && ++choice[q] == table.size()) choice[q--] = 0;
    if (q < 0) break;
  }
  for (auto& a : acc) a /= tuples;
  return acc;
}

/// Clifford averages used to validate the shadow channel (x = |0...0>).
inline CMatrix twirl2_average(int n, const CMatrix& a) {
  const auto& table = clifford_table(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (const auto& u : table) {
    CVector v = u.row(0).adjoint();  // U^dagger |0>
    cplx w = v.adjoint() * a * v;    // <0|U A U^dagger|0>
    acc += w * v * v.adjoint();
  }
  return acc / static_cast<double>(table.size());
}

inline CMatrix twirl2_formula(int n, const CMatrix& a) {
  const double d = std::pow(2.0, n);
  CMatrix id = CMatrix::Identity(a.rows(), a.cols());
  return (a + a.trace() * id) / (d * (d + 1.0));
}

inline CMatrix twirl3_average(int n, const CMatrix& b, const CMatrix& c) {
  const auto& table = clifford_table(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (const auto& u : table) {
    CVector v = u.row(0).adjoint();
    cplx wb = v.adjoint() * b * v;
    cplx wc = v.adjoint() * c * v;
    acc += wb * wc * v * v.adjoint();
  }
  return acc / static_cast<double>(table.size());
}

inline CMatrix twirl3_formula(int n, const CMatrix& b, const CMatrix& c) {
  const double d = std::pow(2.0, n);
  CMatrix id = CMatrix::Identity(b.rows(), b.cols());
  CMatrix num = id * (b.trace() * c.trace() + (b * c).trace()) + b * c.trace() + c * b.trace() +
                b * c + c * b;
  return num / (d * (d + 1.0) * (d + 2.0));
}

/// M(sigma) = E_U sum_b <b|U sigma U^dagger|b> U^dagger|b><b|U.
inline CMatrix measurement_channel(int n, const CMatrix& sigma) {
  const auto& table = clifford_table(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (const auto& u : table) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      CVector v = u.row(b).adjoint();
      cplx w = v.adjoint() * sigma * v;
      acc += w * v * v.adjoint();
    }
  }
  return acc / static_cast<double>(table.size());
}

inline CMatrix inverse_measurement_channel(int n, const CMatrix& x) {
  const double d = std::pow(2.0, n);
  return (d + 1.0) * x - x.trace() * CMatrix::Identity(x.rows(), x.cols());
}

struct TwirlReport {
  double two_fold = 0.0;
  double three_fold = 0.0;
  double channel = 0.0;

  double max_deviation() const { return std::max({two_fold, three_fold, channel}); }
  bool passed(double tol = 1e-10) const { return max_deviation() < tol; }
};

/// Exhaustive check of the two- and three-fold twirl identities and of
/// M^{-1}(M(A)) = A.
inline TwirlReport twirl_identity_report(int n, const CMatrix& a, const CMatrix& b,
                                         const CMatrix& c) {
  if (n < 1 || n > 2) throw EnumerationUnavailable("twirl enumeration needs n <= 2");
  const Eigen::Index dim = Eigen::Index{1} << n;
  for (const CMatrix* m : {&a, &b, &c})
    if (m->rows() != dim || m->cols() != dim) throw DimensionMismatch("operators must be 2^n x 2^n");
  TwirlReport r;
  r.two_fold = (twirl2_average(n, a) - twirl2_formula(n, a)).cwiseAbs().maxCoeff();
  r.three_fold = (twirl3_average(n, b, c) - twirl3_formula(n, b, c)).cwiseAbs().maxCoeff();
  r.channel = (inverse_measurement_channel(n, measurement_channel(n, a)) - a).cwiseAbs().maxCoeff();
  return r;
}

inline bool twirl_identity_check(int n, const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  return twirl_identity_report(n, a, b, c).passed();
}

}  // namespace fqdyn
