// SPDX-License-Identifier: Apache-2.0
//
// Basis pursuit, min ||s||_1 subject to A s = y, by a primal-dual
// interior-point method.
//
// The problem is solved as the LP
//
//   min sum(u)   s.t.  s - u <= 0,  -s - u <= 0,  A s = y
//
// over (s, u). The rows of A are first orthonormalized by a QR factorization
// of A^T, which leaves the feasible set unchanged. Each iteration takes a
// Newton step on the KKT conditions perturbed by 1/t, with t = mu * 2N / gap.
// Block elimination of the inequality duals and of u reduces the Newton
// system to the M x M SPD system
//
//   A diag(1/sigx) A^T dv = rhs
//
// which is solved through a pivoted QR of its square-root factor. A backtracking line search on the norm of the
// full KKT residual keeps the slacks and duals strictly feasible. The
// iteration stops once the surrogate duality gap -(f1.l1 + f2.l2) drops to
// gap_tol.

#ifndef CHAOSCS_L1SOLVER_HPP
#define CHAOSCS_L1SOLVER_HPP

#include "chaoscs/core.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chaoscs {

enum class SolverStatus { kConverged, kMaxIters, kNumericalFailure };

inline const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIters: return "max_iters";
    case SolverStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

template <typename Scalar = double>
struct SolverConfig {
  Scalar gap_tol = Scalar(1e-3);
  int max_iters = 50;
  Scalar mu = Scalar(10);
  Scalar alpha = Scalar(0.01);  // sufficient decrease
  Scalar beta = Scalar(0.5);    // backtracking factor
  Scalar newton_tol = Scalar(1e-8);

  void validate() const {
    if (!(gap_tol > 0)) throw InvalidArgument("SolverConfig: gap_tol must be positive");
    if (max_iters < 0) throw InvalidArgument("SolverConfig: max_iters must be non-negative");
    if (!(mu > 1)) throw InvalidArgument("SolverConfig: mu must exceed 1");
    if (!(alpha > 0 && alpha < Scalar(0.5))) throw InvalidArgument("SolverConfig: alpha must lie in (0, 0.5)");
    if (!(beta > 0 && beta < 1)) throw InvalidArgument("SolverConfig: beta must lie in (0, 1)");
    if (!(newton_tol > 0)) throw InvalidArgument("SolverConfig: newton_tol must be positive");
  }
};

template <typename Scalar = double>
struct BpSolution {
  VectorX<Scalar> s;
  int iterations = 0;
  Scalar final_gap = 0;
  Scalar residual_norm = 0;
  SolverStatus status = SolverStatus::kConverged;
  /// Surrogate gap at the start and after every accepted iteration.
  std::vector<Scalar> gap_history;
};

template <typename Derived>
typename Derived::RealScalar l1_norm(const Eigen::MatrixBase<Derived>& s) {
  return s.template lpNorm<1>();
}

/// Minimum-l2-norm feasible point A^T (A A^T)^{-1} y. Throws
/// SingularGramError if A A^T is singular or its reciprocal condition
/// estimate falls below 1e-12.
template <typename DerivedA, typename DerivedY>
VectorX<typename DerivedA::Scalar> least_norm_init(const Eigen::MatrixBase<DerivedA>& theta,
                                                   const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedA::Scalar;
  if (theta.rows() != y.size()) {
    throw DimensionMismatchError("least_norm_init: rows(theta) != |y|");
  }
  if (theta.rows() > theta.cols()) {
    throw SingularGramError("least_norm_init: more measurements than unknowns");
  }
  const MatrixX<Scalar> gram = theta * theta.transpose();
  Eigen::LLT<MatrixX<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= Scalar(1e-12))) {
    throw SingularGramError("least_norm_init: theta * theta^T is numerically singular");
  }
  return theta.transpose() * llt.solve(y);
}

template <typename DerivedA, typename DerivedY>
BpSolution<typename DerivedA::Scalar> solve_bp(
    const Eigen::MatrixBase<DerivedA>& theta, const Eigen::MatrixBase<DerivedY>& y,
    const SolverConfig<typename DerivedA::Scalar>& cfg = {}) {
  using Scalar = typename DerivedA::Scalar;
  using Vec = VectorX<Scalar>;
  using std::sqrt;
  cfg.validate();

  const MatrixX<Scalar> theta_eval = theta;
  const Vec y_eval = y;
  const Eigen::Index n = theta_eval.cols();
  const Eigen::Index m = theta_eval.rows();

  BpSolution<Scalar> out;
  Vec x = least_norm_init(theta_eval, y_eval);

  const Scalar ynorm = y_eval.norm();
  if (ynorm == Scalar(0)) {
    out.s = Vec::Zero(n);
    return out;
  }
  if (m == n) {
    // Square and nonsingular: the constraint set is a single point.
    out.s = x;
    out.residual_norm = (theta_eval * x - y_eval).norm();
    return out;
  }

  // Iterate on an orthonormal-row basis of the same constraint set:
  // theta = R^T Q^T, so theta s = y  <=>  Q^T s = R^{-T} y. The feasible set,
  // and hence the l1 minimizer, is unchanged; the Newton systems no longer
  // inherit the conditioning of theta's rows.
  const Eigen::HouseholderQR<MatrixX<Scalar>> qr(theta_eval.transpose());
  const MatrixX<Scalar> A =
      (qr.householderQ() * MatrixX<Scalar>::Identity(n, m)).transpose();
  const MatrixX<Scalar> R = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  const Vec b = R.transpose().template triangularView<Eigen::Lower>().solve(y_eval);

  const Vec abs_x = x.cwiseAbs();
  Vec u = Scalar(0.95) * abs_x + Vec::Constant(n, Scalar(0.10) * abs_x.maxCoeff());
  Vec fu1 = x - u;
  Vec fu2 = -x - u;
  Vec lamu1 = -fu1.cwiseInverse();
  Vec lamu2 = -fu2.cwiseInverse();
  Vec v = -A * (lamu1 - lamu2);
  Vec Atv = A.transpose() * v;
  Vec rpri = A * x - b;

  auto residual_norm = [n](const Vec& l1, const Vec& l2, const Vec& f1, const Vec& f2,
                           const Vec& atv, const Vec& rp, Scalar inv_t) {
    const Vec rdual_s = l1 - l2 + atv;
    const Vec rdual_u = Vec::Ones(n) - l1 - l2;
    const Vec rc1 = (-l1.cwiseProduct(f1)).array() - inv_t;
    const Vec rc2 = (-l2.cwiseProduct(f2)).array() - inv_t;
    return sqrt(rdual_s.squaredNorm() + rdual_u.squaredNorm() + rc1.squaredNorm() +
                rc2.squaredNorm() + rp.squaredNorm());
  };

  Scalar sdg = -(fu1.dot(lamu1) + fu2.dot(lamu2));
  Scalar tau = cfg.mu * Scalar(2 * n) / sdg;
  Scalar resnorm = residual_norm(lamu1, lamu2, fu1, fu2, Atv, rpri, Scalar(1) / tau);
  out.gap_history.push_back(sdg);

  auto finish = [&](SolverStatus status) {
    out.s = x;
    out.final_gap = sdg;
    out.residual_norm = (theta_eval * x - y_eval).norm();
    out.status = status;
    if (status == SolverStatus::kConverged && out.residual_norm > Scalar(1e-6) * ynorm) {
      out.status = SolverStatus::kNumericalFailure;
    }
    return out;
  };

  while (!(sdg <= cfg.gap_tol)) {
    if (out.iterations >= cfg.max_iters) return finish(SolverStatus::kMaxIters);

    const Scalar inv_t = Scalar(1) / tau;
    const Vec w1 = -inv_t * (fu2.cwiseInverse() - fu1.cwiseInverse()) - Atv;
    const Vec w2 = Vec::Constant(n, Scalar(-1)) - inv_t * (fu1.cwiseInverse() + fu2.cwiseInverse());
    const Vec w3 = -rpri;

    const Vec q1 = lamu1.cwiseQuotient(fu1);
    const Vec q2 = lamu2.cwiseQuotient(fu2);
    const Vec sig1 = -q1 - q2;
    const Vec sig2 = q1 - q2;
    // sig1 - sig2^2 / sig1, rewritten to avoid cancellation.
    const Vec sigx = Scalar(-4) * q1.cwiseProduct(q2).cwiseQuotient(q1 + q2);

    // Reduced Newton system, negated to make it positive definite.
    const Vec inv_sigx = sigx.cwiseInverse();
    const MatrixX<Scalar> H = A * inv_sigx.asDiagonal() * A.transpose();
    const Vec rhs = -w3 + A * (w1.cwiseProduct(inv_sigx) -
                               w2.cwiseProduct(sig2).cwiseQuotient(sigx.cwiseProduct(sig1)));
    // H = B B^T with B = A diag(sigx)^{-1/2}. Factor B^T P = Q R rather than
    // H itself so the conditioning is not squared: H = P R^T R P^T.
    const MatrixX<Scalar> Bt = inv_sigx.cwiseSqrt().asDiagonal() * A.transpose();
    const Eigen::ColPivHouseholderQR<MatrixX<Scalar>> fac(Bt);
    const auto r_diag = fac.matrixQR().diagonal().head(m).cwiseAbs();
    if (!Bt.allFinite() || !(r_diag.minCoeff() >= Scalar(1e-10) * r_diag.maxCoeff())) {
      return finish(SolverStatus::kNumericalFailure);
    }
    const auto R = fac.matrixQR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
    Vec z = fac.colsPermutation().transpose() * rhs;
    R.transpose().solveInPlace(z);
    R.solveInPlace(z);
    const Vec dv = fac.colsPermutation() * z;
    // Normwise backward error of the Newton solve.
    const Scalar newton_scale = H.norm() * dv.norm() + rhs.norm();
    if (!dv.allFinite() || (H * dv - rhs).norm() > cfg.newton_tol * newton_scale) {
      return finish(SolverStatus::kNumericalFailure);
    }

    const Vec Atdv = A.transpose() * dv;
    const Vec dx = (w1 - w2.cwiseProduct(sig2).cwiseQuotient(sig1) - Atdv).cwiseProduct(inv_sigx);
    const Vec Adx = A * dx;
    const Vec du = (w2 - sig2.cwiseProduct(dx)).cwiseQuotient(sig1);
    const Vec dlamu1 = q1.cwiseProduct(du - dx) - lamu1 - inv_t * fu1.cwiseInverse();
    const Vec dlamu2 = q2.cwiseProduct(dx + du) - lamu2 - inv_t * fu2.cwiseInverse();

    // Largest step keeping lamu > 0 and fu < 0, then pull back by 1%.
    Scalar step = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dlamu1(i) < 0) step = std::min(step, -lamu1(i) / dlamu1(i));
      if (dlamu2(i) < 0) step = std::min(step, -lamu2(i) / dlamu2(i));
      const Scalar d1 = dx(i) - du(i);
      const Scalar d2 = -dx(i) - du(i);
      if (d1 > 0) step = std::min(step, -fu1(i) / d1);
      if (d2 > 0) step = std::min(step, -fu2(i) / d2);
    }
    step *= Scalar(0.99);

    Vec xp, up, vp, Atvp, lamu1p, lamu2p, fu1p, fu2p, rprip;
    bool sufficient = false;
    for (int back = 0; back <= 32; ++back) {
      if (step < Scalar(1e-12)) break;
      xp = x + step * dx;
      up = u + step * du;
      vp = v + step * dv;
      Atvp = Atv + step * Atdv;
      lamu1p = lamu1 + step * dlamu1;
      lamu2p = lamu2 + step * dlamu2;
      fu1p = xp - up;
      fu2p = -xp - up;
      rprip = rpri + step * Adx;
      if (residual_norm(lamu1p, lamu2p, fu1p, fu2p, Atvp, rprip, inv_t) <=
          (Scalar(1) - cfg.alpha * step) * resnorm) {
        sufficient = true;
        break;
      }
      step *= cfg.beta;
    }
    if (!sufficient) return finish(SolverStatus::kNumericalFailure);

    x = std::move(xp);
    u = std::move(up);
    v = std::move(vp);
    lamu1 = std::move(lamu1p);
    lamu2 = std::move(lamu2p);
    fu1 = std::move(fu1p);
    fu2 = std::move(fu2p);
    // Refresh the linear residuals from scratch so they do not drift.
    Atv = A.transpose() * v;
    rpri = A * x - b;
    ++out.iterations;

    sdg = -(fu1.dot(lamu1) + fu2.dot(lamu2));
    tau = cfg.mu * Scalar(2 * n) / sdg;
    resnorm = residual_norm(lamu1, lamu2, fu1, fu2, Atv, rpri, Scalar(1) / tau);
    out.gap_history.push_back(sdg);
  }
  return finish(SolverStatus::kConverged);
}

/// Theta and y bundled for callers that pass problems around.
template <typename Scalar = double>
struct BpProblem {
  MatrixX<Scalar> theta;
  VectorX<Scalar> y;
};

template <typename Scalar>
BpSolution<Scalar> solve_bp(const BpProblem<Scalar>& problem,
                            const SolverConfig<Scalar>& cfg = {}) {
  return solve_bp(problem.theta, problem.y, cfg);
}

}  // namespace chaoscs

#endif  // CHAOSCS_L1SOLVER_HPP
