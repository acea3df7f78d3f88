// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/ensembles.hpp"

#include "chaoscs/seeding.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace chaoscs {

bool is_chaotic(SequenceKind kind) {
  return kind == SequenceKind::kChuaX1 || kind == SequenceKind::kLorenzX1 ||
         kind == SequenceKind::kRosslerX1;
}

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::kChuaX1: return "chua_x1";
    case SequenceKind::kLorenzX1: return "lorenz_x1";
    case SequenceKind::kRosslerX1: return "rossler_x1";
    case SequenceKind::kIidGaussian: return "iid_gaussian";
    case SequenceKind::kAr1Gaussian: return "ar1_gaussian";
    case SequenceKind::kBernoulliPm1: return "bernoulli_pm1";
    case SequenceKind::kUniform01: return "uniform_01";
    case SequenceKind::kUniformPmHalf: return "uniform_pm_half";
  }
  return "unknown";
}

std::optional<SequenceKind> parse_sequence_kind(std::string_view name) {
  struct Alias {
    std::string_view name;
    SequenceKind kind;
  };
  static constexpr Alias kAliases[] = {
      {"chua_x1", SequenceKind::kChuaX1},
      {"chua", SequenceKind::kChuaX1},
      {"lorenz_x1", SequenceKind::kLorenzX1},
      {"lorenz", SequenceKind::kLorenzX1},
      {"rossler_x1", SequenceKind::kRosslerX1},
      {"rossler", SequenceKind::kRosslerX1},
      {"iid_gaussian", SequenceKind::kIidGaussian},
      {"gaussian", SequenceKind::kIidGaussian},
      {"ar1_gaussian", SequenceKind::kAr1Gaussian},
      {"ar1", SequenceKind::kAr1Gaussian},
      {"bernoulli_pm1", SequenceKind::kBernoulliPm1},
      {"bernoulli", SequenceKind::kBernoulliPm1},
      {"uniform_01", SequenceKind::kUniform01},
      {"uniform01", SequenceKind::kUniform01},
      {"uniform_pm_half", SequenceKind::kUniformPmHalf},
      {"uniform_sym", SequenceKind::kUniformPmHalf},
  };
  for (const auto& alias : kAliases) {
    if (alias.name == name) return alias.kind;
  }
  return std::nullopt;
}

std::string describe(const SequenceSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(spec.kind) << '[';
  if (is_chaotic(spec.kind)) {
    const auto cfg = resolve_integrator(spec);
    out << "tau=" << cfg.tau << ";h=" << cfg.step << ";burn_in=" << cfg.burn_in << ';';
  }
  if (spec.kind == SequenceKind::kAr1Gaussian) out << "rho=" << spec.rho << ';';
  out << "seed=" << spec.seed << ']';
  return out.str();
}

namespace {

SystemKind system_of(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::kChuaX1: return SystemKind::kChua;
    case SequenceKind::kLorenzX1: return SystemKind::kLorenz;
    case SequenceKind::kRosslerX1: return SystemKind::kRossler;
    default: break;
  }
  throw InvalidArgument("not a chaotic sequence kind");
}

template <typename Draw>
Vectord fill(std::size_t length, Draw&& draw) {
  Vectord v(static_cast<Eigen::Index>(length));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = draw();
  return v;
}

}  // namespace

IntegratorConfig<double> resolve_integrator(const SequenceSpec& spec) {
  const SystemKind system = system_of(spec.kind);
  IntegratorConfig<double> cfg = default_integrator_config<double>(system);
  if (spec.tau) cfg.tau = *spec.tau;
  if (spec.step) cfg.step = *spec.step;
  if (spec.burn_in) cfg.burn_in = *spec.burn_in;

  Rng rng = make_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::kInitialState)}));
  std::uniform_real_distribution<double> offset(-0.01, 0.01);
  for (int i = 0; i < 3; ++i) cfg.initial_state(i) += offset(rng);
  return cfg;
}

Sequence generate(const SequenceSpec& spec, std::size_t length) {
  if (length < 1) throw InvalidArgument("generate: length must be >= 1");

  if (is_chaotic(spec.kind)) {
    const SystemKind system = system_of(spec.kind);
    const auto traj = integrate(default_params<double>(system), resolve_integrator(spec), length);
    Sequence seq = extract_scalar(traj, 1);
    seq.spec = spec;
    return seq;
  }

  Sequence seq;
  seq.spec = spec;
  Rng rng = make_rng(spec.seed);
  switch (spec.kind) {
    case SequenceKind::kIidGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      seq.values = fill(length, [&] { return normal(rng); });
      break;
    }
    case SequenceKind::kAr1Gaussian: {
      if (!(spec.rho > -1.0 && spec.rho < 1.0)) {
        throw InvalidArgument("generate: ar1_gaussian requires |rho| < 1");
      }
      std::normal_distribution<double> normal(0.0, 1.0);
      const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);
      double prev = normal(rng);
      bool first = true;
      seq.values = fill(length, [&] {
        if (!first) prev = spec.rho * prev + innovation * normal(rng);
        first = false;
        return prev;
      });
      break;
    }
    case SequenceKind::kBernoulliPm1: {
      std::bernoulli_distribution coin(0.5);
      seq.values = fill(length, [&] { return coin(rng) ? 1.0 : -1.0; });
      break;
    }
    case SequenceKind::kUniform01: {
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      seq.values = fill(length, [&] { return uniform(rng); });
      break;
    }
    case SequenceKind::kUniformPmHalf: {
      std::uniform_real_distribution<double> uniform(-0.5, 0.5);
      seq.values = fill(length, [&] { return uniform(rng); });
      break;
    }
    default:
      throw InvalidArgument("generate: unhandled sequence kind");
  }
  return seq;
}

SampleStats sample_stats(const Eigen::Ref<const Vectord>& values) {
  if (values.size() < 1) throw InvalidArgument("sample_stats: empty sequence");
  SampleStats stats;
  stats.mean = values.mean();
  stats.variance = (values.array() - stats.mean).square().mean();
  if (!(stats.variance > 0.0)) {
    throw DegenerateSequenceError("sample_stats: sequence has zero variance");
  }
  return stats;
}

SampleStats sample_stats(const Sequence& seq) {
  if (seq.size() < 2) throw DegenerateSequenceError("sample_stats: need at least two samples");
  return sample_stats(seq.values);
}

}  // namespace chaoscs
