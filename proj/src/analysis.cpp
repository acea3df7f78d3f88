// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chaoscs {

AutocorrResult autocorrelation(const Sequence& seq, int max_lag, bool centered) {
  if (max_lag < 0) throw InvalidArgument("autocorrelation: max_lag must be non-negative");
  const Eigen::Index n = seq.size();
  if (n <= 4 * static_cast<Eigen::Index>(max_lag) || n < 1) {
    throw InvalidArgument("autocorrelation: need more than 4 * max_lag samples");
  }
  Vectord c = seq.values;
  if (centered) c.array() -= c.mean();

  const double tau = seq.spec.tau.value_or(1.0);
  AutocorrResult out;
  double r0 = 0.0;
  for (int lag = 0; lag <= max_lag; ++lag) {
    const Eigen::Index m = n - lag;
    const double r = c.head(m).dot(c.segment(lag, m)) / static_cast<double>(m);
    if (lag == 0) {
      if (!(r > 0.0)) throw DegenerateSequenceError("autocorrelation: R(0) is zero");
      r0 = r;
    }
    out.sample_lags.push_back(lag);
    out.lags.push_back(lag * tau);
    out.values.push_back(lag == 0 ? 1.0 : r / r0);
  }
  return out;
}

namespace {

Histogram bin_values(const std::vector<double>& values, double lo, double hi, int n_bins) {
  Histogram h;
  h.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double width = (hi - lo) / n_bins;
  for (int i = 0; i <= n_bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + i * width;
  h.bin_edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    const double pos = (v - lo) / width;
    std::size_t bin = 0;
    if (pos >= n_bins) {
      bin = static_cast<std::size_t>(n_bins) - 1;
    } else if (pos > 0) {
      bin = static_cast<std::size_t>(pos);
    }
    ++h.counts[bin];
  }
  const double total = static_cast<double>(values.size());
  h.density.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.density[i] = total > 0 ? h.counts[i] / (total * width) : 0.0;
  }
  return h;
}

}  // namespace

Histogram empirical_pdf(const Sequence& seq, int n_bins) {
  if (seq.size() < 100) throw InvalidArgument("empirical_pdf: need at least 100 samples");
  if (n_bins < 2) throw InvalidArgument("empirical_pdf: need at least 2 bins");
  const double lo = seq.values.minCoeff();
  const double hi = seq.values.maxCoeff();
  if (!(hi > lo)) throw DegenerateSequenceError("empirical_pdf: sequence has zero range");
  std::vector<double> values(seq.values.data(), seq.values.data() + seq.size());
  return bin_values(values, lo, hi, n_bins);
}

Histogram fixed_range_histogram(const std::vector<double>& values, double lo, double hi,
                                int n_bins) {
  if (n_bins < 1) throw InvalidArgument("histogram: need at least 1 bin");
  if (!(hi > lo)) throw InvalidArgument("histogram: empty range");
  return bin_values(values, lo, hi, n_bins);
}

RecoveryClass classify_recovery(const Eigen::Ref<const Vectord>& x,
                                const Eigen::Ref<const Vectord>& x_r, double epsilon) {
  if (x.size() != x_r.size()) throw DimensionMismatchError("classify_recovery: length mismatch");
  const double xnorm = x.norm();
  RecoveryClass out;
  out.error = xnorm > 0.0 ? (x - x_r).norm() / xnorm : x_r.norm();
  out.success = out.error < epsilon;
  return out;
}

RecoveryClass classify_recovery(const SparseSignal& x, const Eigen::Ref<const Vectord>& x_r,
                                double epsilon) {
  return classify_recovery(x.values, x_r, epsilon);
}

double interpolate_kmax(const std::vector<int>& ks, const std::vector<double>& rates,
                        double threshold) {
  if (ks.size() != rates.size()) throw InvalidArgument("interpolate_kmax: size mismatch");
  double prev_k = 0.0;
  double prev_rate = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (rates[i] > threshold) {
      const double k = ks[i];
      return prev_k + (k - prev_k) * (threshold - prev_rate) / (rates[i] - prev_rate);
    }
    prev_k = ks[i];
    prev_rate = rates[i];
  }
  throw NoCrossingError("interpolate_kmax: error rate never exceeds " + std::to_string(threshold));
}

}  // namespace chaoscs
