// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/experiment.hpp"

#include "chaoscs/ensembles.hpp"
#include "chaoscs/seeding.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace chaoscs {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::jthread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

RecoveryExperiment::RecoveryExperiment(Eigen::Index n, Eigen::Index m, SequenceSpec ensemble,
                                       ExperimentOptions options)
    : n_(n), m_(m), ensemble_(ensemble), options_(options) {
  if (n < 1 || m < 1 || m > n) throw InvalidArgument("experiment: need 1 <= M <= N");
  if (options_.trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (!(options_.epsilon > 0.0 && options_.epsilon < 1.0)) {
    throw InvalidArgument("experiment: epsilon must lie in (0, 1)");
  }
  options_.solver.validate();
}

void RecoveryExperiment::ensure_matrices() {
  if (built_) return;
  const auto trials = static_cast<std::size_t>(options_.trials);
  matrices_.assign(trials, std::nullopt);
  matrix_errors_.assign(trials, {});
  parallel_for(trials, options_.jobs, [&](std::size_t t) {
    SequenceSpec spec = ensemble_;
    spec.seed = derive_seed(options_.master_seed, {static_cast<std::uint64_t>(Stream::kMatrix), t});
    try {
      const Sequence seq = generate(spec, static_cast<std::size_t>(m_ * n_));
      MatrixBuildOptions build;
      build.center = options_.center;
      matrices_[t] = build_matrix(seq, m_, n_, build);
    } catch (const Error& e) {
      matrix_errors_[t] = e.what();
    }
  });
  built_ = true;
}

std::vector<TrialOutcome> RecoveryExperiment::run(int k) {
  if (k < 0 || k > m_) throw InvalidArgument("experiment: sparsity must lie in [0, M]");
  ensure_matrices();
  const auto trials = static_cast<std::size_t>(options_.trials);
  std::vector<TrialOutcome> outcomes(trials);
  parallel_for(trials, options_.jobs, [&](std::size_t t) {
    TrialOutcome& out = outcomes[t];
    out.error = std::numeric_limits<double>::infinity();
    if (!matrices_[t]) {
      out.solver_failure = true;
      return;
    }
    const MeasurementMatrix& phi = *matrices_[t];
    const auto seed = derive_seed(options_.master_seed,
                                  {static_cast<std::uint64_t>(Stream::kSignal),
                                   static_cast<std::uint64_t>(k), t});
    const SparseSignal x = gen_sparse_signal(n_, k, seed);
    const Vectord y = measure(phi, x);
    try {
      const auto sol = solve_bp(phi.entries, y, options_.solver);
      const RecoveryClass cls = classify_recovery(x, sol.s, options_.epsilon);
      out.error = cls.error;
      if (sol.status != SolverStatus::kConverged) {
        out.solver_failure = true;
        out.success = false;
      } else {
        out.success = cls.success;
      }
    } catch (const Error&) {
      out.solver_failure = true;
    }
  });
  return outcomes;
}

std::vector<double> RecoveryExperiment::sigmas() {
  ensure_matrices();
  std::vector<double> out;
  out.reserve(matrices_.size());
  for (const auto& phi : matrices_) {
    out.push_back(phi ? phi->sigma_used : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

namespace {

void tally(const std::vector<TrialOutcome>& outcomes, int& failures, int& solver_failures) {
  failures = 0;
  solver_failures = 0;
  for (const auto& o : outcomes) {
    if (!o.success) ++failures;
    if (o.solver_failure) ++solver_failures;
  }
}

}  // namespace

RecoveryCurve recovery_curve(RecoveryExperiment& experiment, const std::vector<int>& ks) {
  RecoveryCurve curve;
  curve.n = experiment.n();
  curve.m = experiment.m();
  curve.ensemble = experiment.ensemble();
  curve.trials = experiment.options().trials;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw InvalidArgument("recovery_curve: k values must be strictly increasing");
    }
  }
  for (int k : ks) {
    int failures = 0;
    int solver_failures = 0;
    tally(experiment.run(k), failures, solver_failures);
    curve.ks.push_back(k);
    curve.failures.push_back(failures);
    curve.solver_failures.push_back(solver_failures);
    curve.error_rates.push_back(static_cast<double>(failures) / curve.trials);
  }
  return curve;
}

RecoveryCurve recovery_curve(Eigen::Index n, Eigen::Index m, const std::vector<int>& ks,
                             const SequenceSpec& ensemble, const ExperimentOptions& options) {
  RecoveryExperiment experiment(n, m, ensemble, options);
  return recovery_curve(experiment, ks);
}

KmaxResult kmax_estimate(RecoveryExperiment& experiment, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("kmax_estimate: threshold must lie in (0, 1)");
  }
  KmaxResult result;
  result.n = experiment.n();
  result.m = experiment.m();
  result.ratio = static_cast<double>(result.n) / static_cast<double>(result.m);

  int above_in_a_row = 0;
  for (int k = 1; k <= experiment.m(); ++k) {
    int failures = 0;
    int solver_failures = 0;
    tally(experiment.run(k), failures, solver_failures);
    const double rate = static_cast<double>(failures) / experiment.options().trials;
    result.ks.push_back(k);
    result.error_rates.push_back(rate);
    above_in_a_row = rate > threshold ? above_in_a_row + 1 : 0;
    if (above_in_a_row >= 2) break;
  }
  result.k_max = interpolate_kmax(result.ks, result.error_rates, threshold);
  return result;
}

KmaxResult kmax_estimate(Eigen::Index n, Eigen::Index m, const SequenceSpec& ensemble,
                         const ExperimentOptions& options, double threshold) {
  RecoveryExperiment experiment(n, m, ensemble, options);
  return kmax_estimate(experiment, threshold);
}

std::vector<double> log10_errors(const std::vector<TrialOutcome>& outcomes) {
  std::vector<double> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    out.push_back(std::isfinite(o.error) ? std::log10(std::max(o.error, 1e-12))
                                         : std::numeric_limits<double>::infinity());
  }
  return out;
}

Histogram error_histogram(RecoveryExperiment& experiment, int k, int n_bins) {
  if (experiment.options().trials < 100) {
    throw InvalidArgument("error_histogram: need at least 100 trials");
  }
  return fixed_range_histogram(log10_errors(experiment.run(k)), kLogErrorFloor, kLogErrorCeil,
                               n_bins);
}

Histogram error_histogram(Eigen::Index n, Eigen::Index m, int k, const SequenceSpec& ensemble,
                          const ExperimentOptions& options, int n_bins) {
  RecoveryExperiment experiment(n, m, ensemble, options);
  return error_histogram(experiment, k, n_bins);
}

}  // namespace chaoscs
