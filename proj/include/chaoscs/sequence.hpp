// SPDX-License-Identifier: Apache-2.0

#ifndef CHAOSCS_SEQUENCE_HPP
#define CHAOSCS_SEQUENCE_HPP

#include "chaoscs/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chaoscs {

enum class SequenceKind {
  kChuaX1,
  kLorenzX1,
  kRosslerX1,
  kIidGaussian,
  kAr1Gaussian,
  kBernoulliPm1,
  kUniform01,
  kUniformPmHalf,
};

bool is_chaotic(SequenceKind kind);
std::string_view to_string(SequenceKind kind);

/// Accepts the canonical names (`iid_gaussian`, `lorenz_x1`, ...) and the
/// short CLI aliases (`gaussian`, `lorenz`, `ar1`, `bernoulli`, ...).
std::optional<SequenceKind> parse_sequence_kind(std::string_view name);

/// Everything needed to regenerate a sequence bit-for-bit.
struct SequenceSpec {
  SequenceKind kind = SequenceKind::kIidGaussian;
  std::uint64_t seed = 0;
  /// AR(1) coefficient, |rho| < 1. Only read for kAr1Gaussian.
  double rho = 0.99;
  // Integrator overrides for chaotic kinds; unset means the system default.
  std::optional<double> tau;
  std::optional<double> step;
  std::optional<double> burn_in;
};

/// Compact, comma-free description, e.g. `lorenz_x1[tau=0.5;seed=42]`.
std::string describe(const SequenceSpec& spec);

struct Sequence {
  Vectord values;
  SequenceSpec spec;
  /// State coordinate (1-based) the samples were taken from; 1 for random kinds.
  int coordinate = 1;

  Eigen::Index size() const { return values.size(); }
};

}  // namespace chaoscs

#endif  // CHAOSCS_SEQUENCE_HPP
