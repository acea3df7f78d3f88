// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used only by tests. Nothing here calls
// into the code paths it is used to check.

#ifndef CHAOSCS_TESTS_ORACLES_HPP
#define CHAOSCS_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

/// Optimal value of min ||s||_1 s.t. A s = y by enumerating every basic
/// solution of the standard-form LP min 1'(p+q) s.t. [A -A][p;q] = y,
/// p, q >= 0. Feasible and bounded below by 0, so a vertex is optimal.
inline double bp_vertex_enumeration(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Eigen::MatrixXd big(m, 2 * n);
  big << A, -A;
  std::vector<int> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd basis(m, m);
  while (true) {
    for (int j = 0; j < m; ++j) basis.col(j) = big.col(idx[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.rank() == m) {
      const Eigen::VectorXd z = lu.solve(y);
      if ((z.array() >= -1e-10).all()) best = std::min(best, z.sum());
    }
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == 2 * n - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int q = pos + 1; q < m; ++q) idx[q] = idx[q - 1] + 1;
  }
  return best;
}

/// delta_2 by a double loop over column pairs with closed-form 2x2
/// eigenvalues: lambda = (p + r)/2 +- sqrt(((p - r)/2)^2 + q^2).
inline double rip_delta2_pairwise(const Eigen::MatrixXd& A) {
  double delta = 0.0;
  for (int i = 0; i < A.cols(); ++i) {
    for (int j = i + 1; j < A.cols(); ++j) {
      const double p = A.col(i).squaredNorm();
      const double r = A.col(j).squaredNorm();
      const double q = A.col(i).dot(A.col(j));
      const double mid = 0.5 * (p + r);
      const double rad = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
      delta = std::max({delta, 1.0 - (mid - rad), (mid + rad) - 1.0});
    }
  }
  return delta;
}

}  // namespace oracle

#endif  // CHAOSCS_TESTS_ORACLES_HPP
