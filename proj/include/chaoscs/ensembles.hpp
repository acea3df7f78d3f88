// SPDX-License-Identifier: Apache-2.0
//
// Scalar sequences that fill measurement matrices: chaotic flows sampled at a
// fixed distance, and the classic random ensembles.

#ifndef CHAOSCS_ENSEMBLES_HPP
#define CHAOSCS_ENSEMBLES_HPP

#include "chaoscs/dynamics.hpp"
#include "chaoscs/sequence.hpp"

#include <cstddef>

namespace chaoscs {

/// Integrator settings a chaotic spec resolves to. The initial state is the
/// system default shifted by a seed-derived offset in [-0.01, 0.01]^3, so
/// distinct seeds land on distinct stretches of the attractor after burn-in.
IntegratorConfig<double> resolve_integrator(const SequenceSpec& spec);

/// `length` samples of the ensemble named by `spec`. Deterministic in `spec`.
/// Throws DivergenceError for chaotic kinds whose trajectory blows up.
Sequence generate(const SequenceSpec& spec, std::size_t length);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // biased (divide by n)
};

/// Throws DegenerateSequenceError when the variance is zero.
SampleStats sample_stats(const Sequence& seq);
SampleStats sample_stats(const Eigen::Ref<const Vectord>& values);

}  // namespace chaoscs

#endif  // CHAOSCS_ENSEMBLES_HPP
