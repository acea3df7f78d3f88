// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo recovery experiments: fresh matrix, fresh signal, measure,
// solve, classify.
//
// Seeds: the matrix of trial t is generated from
// derive_seed(master, {kMatrix, t}) and the signal of (k, t) from
// derive_seed(master, {kSignal, k, t}). Matrices therefore depend only on
// the trial index and are shared by every sparsity level of a sweep, and
// no result depends on how trials are scheduled across workers.

#ifndef CHAOSCS_EXPERIMENT_HPP
#define CHAOSCS_EXPERIMENT_HPP

#include "chaoscs/analysis.hpp"
#include "chaoscs/l1solver.hpp"
#include "chaoscs/sensing.hpp"
#include "chaoscs/sequence.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chaoscs {

/// Runs fn(0..count-1) on `jobs` threads. The first exception thrown by any
/// call is rethrown after all workers have joined.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

struct ExperimentOptions {
  int trials = 500;
  double epsilon = 0.01;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  bool center = false;
  SolverConfig<double> solver;
};

struct TrialOutcome {
  double error = 0.0;  // +inf when the trial could not be solved
  bool success = false;
  bool solver_failure = false;
};

class RecoveryExperiment {
 public:
  RecoveryExperiment(Eigen::Index n, Eigen::Index m, SequenceSpec ensemble,
                     ExperimentOptions options);

  /// One outcome per trial at sparsity k, in trial order.
  std::vector<TrialOutcome> run(int k);

  /// sigma_used of every matrix built so far (NaN where construction failed).
  std::vector<double> sigmas();

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  const SequenceSpec& ensemble() const { return ensemble_; }
  const ExperimentOptions& options() const { return options_; }

 private:
  void ensure_matrices();

  Eigen::Index n_;
  Eigen::Index m_;
  SequenceSpec ensemble_;
  ExperimentOptions options_;
  std::vector<std::optional<MeasurementMatrix>> matrices_;
  std::vector<std::string> matrix_errors_;
  bool built_ = false;
};

struct RecoveryCurve {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  SequenceSpec ensemble;
  int trials = 0;
  std::vector<int> ks;
  std::vector<int> failures;
  std::vector<int> solver_failures;
  std::vector<double> error_rates;
};

RecoveryCurve recovery_curve(RecoveryExperiment& experiment, const std::vector<int>& ks);
RecoveryCurve recovery_curve(Eigen::Index n, Eigen::Index m, const std::vector<int>& ks,
                             const SequenceSpec& ensemble, const ExperimentOptions& options);

struct KmaxResult {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double ratio = 0.0;
  double k_max = 0.0;
  std::vector<int> ks;
  std::vector<double> error_rates;
};

/// Sweeps k = 1, 2, ... until the error rate exceeds `threshold` at two
/// consecutive k (or k reaches M), then interpolates the first crossing.
KmaxResult kmax_estimate(RecoveryExperiment& experiment, double threshold = 0.1);
KmaxResult kmax_estimate(Eigen::Index n, Eigen::Index m, const SequenceSpec& ensemble,
                         const ExperimentOptions& options, double threshold = 0.1);

inline constexpr double kLogErrorFloor = -12.0;
inline constexpr double kLogErrorCeil = 1.0;

/// log10 of each relative error, floored at 1e-12. Unsolved trials map to +inf.
std::vector<double> log10_errors(const std::vector<TrialOutcome>& outcomes);

/// Histogram of log10 relative error over [-12, 1] (clamped at both ends).
Histogram error_histogram(RecoveryExperiment& experiment, int k, int n_bins);
Histogram error_histogram(Eigen::Index n, Eigen::Index m, int k, const SequenceSpec& ensemble,
                          const ExperimentOptions& options, int n_bins);

}  // namespace chaoscs

#endif  // CHAOSCS_EXPERIMENT_HPP
