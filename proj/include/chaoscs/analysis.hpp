// SPDX-License-Identifier: Apache-2.0
//
// Statistical and compressive-sensing diagnostics: autocorrelation,
// empirical densities, coherence, brute-force restricted isometry constants,
// and recovery classification.

#ifndef CHAOSCS_ANALYSIS_HPP
#define CHAOSCS_ANALYSIS_HPP

#include "chaoscs/core.hpp"
#include "chaoscs/sensing.hpp"
#include "chaoscs/sequence.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <vector>

namespace chaoscs {

struct AutocorrResult {
  std::vector<int> sample_lags;
  std::vector<double> lags;  // sample lag times the sampling distance
  std::vector<double> values;
};

/// R(l) = 1/(n-l) sum_i c[i+l] c[i], reported as R(l)/R(0) for l = 0..max_lag.
/// With `centered`, the sample mean is removed first.
/// Requires |seq| > 4 * max_lag; throws DegenerateSequenceError if R(0) = 0.
AutocorrResult autocorrelation(const Sequence& seq, int max_lag, bool centered = false);

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::vector<double> density;  // count / (total * width)

  std::size_t bins() const { return counts.size(); }
  std::int64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
};

/// Equal-width bins over [min, max], density-normalized. The top edge is
/// inclusive. Requires |seq| >= 100 and n_bins >= 2.
Histogram empirical_pdf(const Sequence& seq, int n_bins);

/// Counts `values` into `n_bins` equal bins over [lo, hi]; values outside
/// the range are clamped into the end bins.
Histogram fixed_range_histogram(const std::vector<double>& values, double lo, double hi, int n_bins);

/// sqrt(N) * max |<psi_k, phi_j>| over unit-normalized columns. Both
/// arguments hold their basis vectors as columns of length N. Works for real
/// and complex scalars.
template <typename DerivedPhi, typename DerivedPsi>
typename DerivedPhi::RealScalar coherence(const Eigen::MatrixBase<DerivedPhi>& phi,
                                          const Eigen::MatrixBase<DerivedPsi>& psi) {
  using Real = typename DerivedPhi::RealScalar;
  if (phi.rows() != psi.rows()) {
    throw DimensionMismatchError("coherence: basis vectors must share the same dimension");
  }
  if (phi.cols() == 0 || psi.cols() == 0) throw InvalidArgument("coherence: empty basis");
  auto normalized = [](const auto& m) {
    using M = MatrixX<typename std::decay_t<decltype(m)>::Scalar>;
    M out = m;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const auto norm = out.col(j).norm();
      if (norm == 0) throw ZeroColumnError("coherence: zero basis vector");
      out.col(j) /= norm;
    }
    return out;
  };
  const auto phi_n = normalized(phi.derived());
  const auto psi_n = normalized(psi.derived());
  const Real max_inner = (psi_n.adjoint() * phi_n).cwiseAbs().maxCoeff();
  using std::sqrt;
  return sqrt(Real(phi.rows())) * max_inner;
}

struct RipEstimate {
  int k = 0;
  double delta = 0.0;
};

/// Exhaustive restricted isometry constant: the largest deviation from 1 of
/// any eigenvalue of Theta_S^T Theta_S over all k-column subsets S.
/// Guarded to N <= 20 and C(N, k) <= 1e6 (TooLargeError).
template <typename Derived>
RipEstimate rip_constant_bruteforce(const Eigen::MatrixBase<Derived>& theta, int k) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(theta.cols());
  if (k < 1 || k > n) throw InvalidArgument("rip_constant_bruteforce: need 1 <= k <= N");
  if (n > 20) throw TooLargeError("rip_constant_bruteforce: N exceeds 20");
  double subsets = 1.0;
  for (int i = 0; i < k; ++i) subsets = subsets * (n - i) / (i + 1);
  if (subsets > 1e6) throw TooLargeError("rip_constant_bruteforce: more than 1e6 subsets");

  const MatrixX<Scalar> gram = theta.adjoint() * theta;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  MatrixX<Scalar> sub(k, k);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig;
  double delta = 0.0;
  while (true) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = gram(idx[a], idx[b]);
    eig.compute(sub, Eigen::EigenvaluesOnly);
    const auto& lambda = eig.eigenvalues();  // ascending
    delta = std::max({delta, static_cast<double>(1 - lambda(0)),
                      static_cast<double>(lambda(k - 1) - 1)});

    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
  return {k, delta};
}

struct RecoveryClass {
  double error = 0.0;
  bool success = false;
};

/// e = ||x - x_r|| / ||x||, success iff e < epsilon. For x = 0 the error is
/// ||x_r|| itself.
RecoveryClass classify_recovery(const Eigen::Ref<const Vectord>& x,
                                const Eigen::Ref<const Vectord>& x_r, double epsilon);
RecoveryClass classify_recovery(const SparseSignal& x, const Eigen::Ref<const Vectord>& x_r,
                                double epsilon);

/// Linear interpolation of the first upward crossing of `threshold`.
/// The crossing is at the first k whose rate strictly exceeds the threshold;
/// the previous point is (k-1, rate) from the list, or (0, 0) when the first
/// listed k already exceeds it. Throws NoCrossingError if no rate does.
double interpolate_kmax(const std::vector<int>& ks, const std::vector<double>& rates,
                        double threshold);

}  // namespace chaoscs

#endif  // CHAOSCS_ANALYSIS_HPP
