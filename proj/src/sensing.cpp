// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/sensing.hpp"

#include "chaoscs/ensembles.hpp"
#include "chaoscs/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace chaoscs {

MeasurementMatrix build_matrix(const Sequence& seq, Eigen::Index rows, Eigen::Index cols,
                               const MatrixBuildOptions& options) {
  if (rows < 1 || cols < 1) throw InvalidArgument("build_matrix: dimensions must be positive");
  if (rows > cols) throw InvalidArgument("build_matrix: requires M <= N");
  if (seq.size() != rows * cols) {
    throw LengthMismatchError("build_matrix: sequence length " + std::to_string(seq.size()) +
                              " != M*N = " + std::to_string(rows * cols));
  }

  const SampleStats stats = sample_stats(seq.values);
  const double sigma = options.sigma_override.value_or(std::sqrt(stats.variance));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DegenerateSequenceError("build_matrix: sigma must be positive and finite");
  }

  MeasurementMatrix phi;
  phi.source = seq.spec;
  phi.sigma_used = sigma;
  phi.centered = options.center;
  // Column-major storage makes the columnwise fill a plain reshape.
  phi.entries = Eigen::Map<const Matrixd>(seq.values.data(), rows, cols);
  if (options.center) phi.entries.array() -= stats.mean;
  phi.entries /= sigma * std::sqrt(static_cast<double>(rows));
  return phi;
}

SparseSignal gen_sparse_signal(Eigen::Index length, Eigen::Index sparsity, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("gen_sparse_signal: length must be positive");
  if (sparsity < 0 || sparsity > length) {
    throw InvalidArgument("gen_sparse_signal: sparsity must lie in [0, N]");
  }
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);

  std::vector<double> values(static_cast<std::size_t>(length), 0.0);
  for (Eigen::Index i = 0; i < sparsity; ++i) values[static_cast<std::size_t>(i)] = coin(rng) ? 1.0 : -1.0;
  std::shuffle(values.begin(), values.end(), rng);

  SparseSignal x;
  x.values = Eigen::Map<const Vectord>(values.data(), length);
  x.sparsity = sparsity;
  return x;
}

Vectord measure(const MeasurementMatrix& phi, const Eigen::Ref<const Vectord>& x) {
  if (phi.cols() != x.size()) {
    throw DimensionMismatchError("measure: matrix has " + std::to_string(phi.cols()) +
                                 " columns but signal has length " + std::to_string(x.size()));
  }
  return phi.entries * x;
}

Vectord measure(const MeasurementMatrix& phi, const SparseSignal& x) {
  return measure(phi, x.values);
}

void write_matrix_csv(std::ostream& out, const MeasurementMatrix& phi) {
  const auto old_precision = out.precision(17);
  out << "M,N,sigma,spec\n";
  out << phi.rows() << ',' << phi.cols() << ',' << phi.sigma_used << ',' << describe(phi.source)
      << '\n';
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
      if (j > 0) out << ',';
      out << phi.entries(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace chaoscs
