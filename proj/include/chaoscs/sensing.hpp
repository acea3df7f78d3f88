// SPDX-License-Identifier: Apache-2.0
//
// Measurement matrices filled columnwise from a scalar sequence, k-sparse
// spike signals, and the linear measurement y = Phi x.

#ifndef CHAOSCS_SENSING_HPP
#define CHAOSCS_SENSING_HPP

#include "chaoscs/core.hpp"
#include "chaoscs/sequence.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace chaoscs {

struct MeasurementMatrix {
  Matrixd entries;  // M x N
  SequenceSpec source;
  double sigma_used = 1.0;
  bool centered = false;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

struct MatrixBuildOptions {
  /// Subtract the sample mean before scaling. Off by default.
  bool center = false;
  /// Use this sigma instead of the sample standard deviation. Test hook.
  std::optional<double> sigma_override;
};

/// entry(i, j) = c[j*M + i] / (sigma * sqrt(M)), sigma^2 the biased sample
/// variance of `seq`. Requires |seq| == M*N and M <= N.
MeasurementMatrix build_matrix(const Sequence& seq, Eigen::Index rows, Eigen::Index cols,
                               const MatrixBuildOptions& options = {});

struct SparseSignal {
  Vectord values;
  Eigen::Index sparsity = 0;

  Eigen::Index size() const { return values.size(); }
};

/// k random-sign unit spikes at uniformly random positions among N samples.
SparseSignal gen_sparse_signal(Eigen::Index length, Eigen::Index sparsity, std::uint64_t seed);

/// y = Phi x. Throws DimensionMismatchError if Phi.cols() != |x|.
Vectord measure(const MeasurementMatrix& phi, const SparseSignal& x);
Vectord measure(const MeasurementMatrix& phi, const Eigen::Ref<const Vectord>& x);

/// Header `M,N,sigma,spec`, one value row, then M rows of N entries.
void write_matrix_csv(std::ostream& out, const MeasurementMatrix& phi);

}  // namespace chaoscs

#endif  // CHAOSCS_SENSING_HPP
