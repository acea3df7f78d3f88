// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/experiment.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace chaoscs;

namespace {

SequenceSpec gaussian() {
  SequenceSpec spec;
  spec.kind = SequenceKind::kIidGaussian;
  return spec;
}

ExperimentOptions options(int trials, std::uint64_t seed = 7, int jobs = 1) {
  ExperimentOptions opts;
  opts.trials = trials;
  opts.master_seed = seed;
  opts.jobs = jobs;
  return opts;
}

double mass_between(const Histogram& h, double lo, double hi) {
  std::int64_t count = 0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    if (h.bin_edges[b] >= lo - 1e-9 && h.bin_edges[b + 1] <= hi + 1e-9) count += h.counts[b];
  }
  return static_cast<double>(count) / static_cast<double>(h.total());
}

}  // namespace

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("recovery curve regimes") {
  const auto curve = recovery_curve(100, 50, {0, 5, 45}, gaussian(), options(200));
  REQUIRE(curve.error_rates.size() == 3);
  CHECK(curve.error_rates[0] == 0.0);
  CHECK(curve.error_rates[1] <= 0.02);
  CHECK(curve.error_rates[2] >= 0.95);
  CHECK(curve.trials == 200);
  CHECK_THROWS_AS(recovery_curve(100, 50, {5, 5}, gaussian(), options(10)), InvalidArgument);
}

TEST_CASE("results do not depend on the number of workers") {
  RecoveryExperiment serial(60, 30, gaussian(), options(60, 3, 1));
  const auto base = recovery_curve(serial, {4, 8, 12});
  for (int jobs : {4, 8}) {
    RecoveryExperiment parallel(60, 30, gaussian(), options(60, 3, jobs));
    const auto other = recovery_curve(parallel, {4, 8, 12});
    CHECK(other.failures == base.failures);
    const auto a = serial.run(8);
    const auto b = parallel.run(8);
    for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t].error == b[t].error);
  }
}

TEST_CASE("matrices are shared across sparsity levels") {
  RecoveryExperiment exp(40, 20, gaussian(), options(20));
  exp.run(2);
  const auto first = exp.sigmas();
  exp.run(5);
  CHECK(exp.sigmas() == first);
}

TEST_CASE("error histogram shapes") {
  RecoveryExperiment exp(100, 50, gaussian(), options(200));
  SUBCASE("k = 0 sits in the floor bin") {
    const auto h = error_histogram(exp, 0, 52);
    CHECK(h.counts.front() == 200);
  }
  SUBCASE("k = 11 leaves the middle band empty") {
    const auto h = error_histogram(exp, 11, 52);
    CHECK(mass_between(h, -2.5, -0.5) == 0.0);
  }
  SUBCASE("k = 20 is bimodal") {
    const auto h = error_histogram(exp, 20, 52);
    CHECK(mass_between(h, kLogErrorFloor, -2.5) >= 0.05);
    CHECK(mass_between(h, -0.5, kLogErrorCeil) >= 0.05);
  }
  CHECK_THROWS_AS(error_histogram(100, 50, 5, gaussian(), options(50), 52), InvalidArgument);
}

TEST_CASE("epsilon barely matters") {
  auto tight = options(100);
  auto loose = options(100);
  tight.epsilon = 0.001;
  loose.epsilon = 0.1;
  for (int k : {11, 20}) {
    const auto a = recovery_curve(100, 50, {k}, gaussian(), tight);
    const auto b = recovery_curve(100, 50, {k}, gaussian(), loose);
    CHECK(std::abs(a.error_rates[0] - b.error_rates[0]) <= 0.05);
  }
}

TEST_CASE("kmax estimate is sane") {
  const auto r = kmax_estimate(100, 50, gaussian(), options(100));
  CHECK(r.k_max > 5.0);
  CHECK(r.k_max < 25.0);
  CHECK(r.ratio == doctest::Approx(2.0));
}

TEST_CASE("experiment rejects bad sizes") {
  CHECK_THROWS_AS(RecoveryExperiment(10, 20, gaussian(), options(5)), InvalidArgument);
  RecoveryExperiment exp(10, 5, gaussian(), options(5));
  CHECK_THROWS_AS(exp.run(6), InvalidArgument);
}
