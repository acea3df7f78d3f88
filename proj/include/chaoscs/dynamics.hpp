// SPDX-License-Identifier: Apache-2.0
//
// Chaotic flows (Chua, Lorenz, Roessler) and a fixed-step RK4 sampler.
//
// Each parameter struct doubles as the system tag: vector_field() is
// overloaded on it, and rk4_step()/integrate() accept anything callable as
// `field(state) -> state`, so tests can plug in stub fields.

#ifndef CHAOSCS_DYNAMICS_HPP
#define CHAOSCS_DYNAMICS_HPP

#include "chaoscs/core.hpp"
#include "chaoscs/sequence.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chaoscs {

template <typename Scalar>
using State3 = Vector3<Scalar>;

enum class SystemKind { kChua, kLorenz, kRossler };

inline std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kChua: return "chua";
    case SystemKind::kLorenz: return "lorenz";
    case SystemKind::kRossler: return "rossler";
  }
  return "unknown";
}

/// Dimensionless Chua circuit; defaults give the double-scroll attractor.
template <typename Scalar = double>
struct ChuaParams {
  static constexpr SystemKind kind = SystemKind::kChua;
  Scalar a = Scalar(-1.27);
  Scalar b = Scalar(-0.68);
  Scalar alpha = Scalar(10.0);
  Scalar beta = Scalar(14.87);
};

template <typename Scalar = double>
struct LorenzParams {
  static constexpr SystemKind kind = SystemKind::kLorenz;
  Scalar sigma = Scalar(16.0);
  Scalar r = Scalar(45.6);
  Scalar b = Scalar(4.0);
};

template <typename Scalar = double>
struct RosslerParams {
  static constexpr SystemKind kind = SystemKind::kRossler;
  Scalar a = Scalar(0.2);
  Scalar b = Scalar(0.2);
  Scalar c = Scalar(5.7);
};

template <typename Scalar = double>
using SystemParams =
    std::variant<ChuaParams<Scalar>, LorenzParams<Scalar>, RosslerParams<Scalar>>;

/// Piecewise-linear diode characteristic g(x1) = b x1 + (a - b)(|x1+1| - |x1-1|) / 2.
template <typename Scalar>
Scalar chua_nonlinearity(Scalar x1, const ChuaParams<Scalar>& p) {
  using std::abs;
  return p.b * x1 + Scalar(0.5) * (p.a - p.b) * (abs(x1 + Scalar(1)) - abs(x1 - Scalar(1)));
}

template <typename Scalar>
State3<Scalar> vector_field(const ChuaParams<Scalar>& p, const State3<Scalar>& x) {
  return State3<Scalar>(p.alpha * (x(1) - x(0) - chua_nonlinearity(x(0), p)),
                        x(0) - x(1) + x(2),
                        -p.beta * x(1));
}

template <typename Scalar>
State3<Scalar> vector_field(const LorenzParams<Scalar>& p, const State3<Scalar>& x) {
  return State3<Scalar>(p.sigma * (x(1) - x(0)),
                        p.r * x(0) - x(0) * x(2) - x(1),
                        x(0) * x(1) - p.b * x(2));
}

template <typename Scalar>
State3<Scalar> vector_field(const RosslerParams<Scalar>& p, const State3<Scalar>& x) {
  return State3<Scalar>(-x(1) - x(2),
                        x(0) + p.a * x(1),
                        p.b + x(2) * (x(0) - p.c));
}

template <typename Scalar>
State3<Scalar> vector_field(const SystemParams<Scalar>& params, const State3<Scalar>& x) {
  return std::visit([&](const auto& p) { return vector_field(p, x); }, params);
}

/// Classical RK4 advance by h. No finiteness check; see rk4_step().
template <typename Field, typename Scalar>
State3<Scalar> rk4_advance(const Field& field, const State3<Scalar>& x, Scalar h) {
  const Scalar half = h / Scalar(2);
  const State3<Scalar> k1 = field(x);
  const State3<Scalar> k2 = field(State3<Scalar>(x + half * k1));
  const State3<Scalar> k3 = field(State3<Scalar>(x + half * k2));
  const State3<Scalar> k4 = field(State3<Scalar>(x + h * k3));
  return x + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

template <typename Scalar>
bool all_finite(const State3<Scalar>& x) {
  using std::isfinite;
  return isfinite(x(0)) && isfinite(x(1)) && isfinite(x(2));
}

/// One RK4 step of `field`; throws DivergenceError if the result is not finite.
template <typename Field, typename Scalar>
State3<Scalar> rk4_step(const Field& field, const State3<Scalar>& x, Scalar h) {
  if (!(h > Scalar(0))) throw InvalidArgument("rk4_step: step must be positive");
  State3<Scalar> next = rk4_advance(field, x, h);
  if (!all_finite(next)) throw DivergenceError("rk4_step: non-finite state", 0.0);
  return next;
}

template <typename Scalar>
State3<Scalar> rk4_step(const SystemParams<Scalar>& params, const State3<Scalar>& x,
                        Scalar h) {
  return std::visit(
      [&](const auto& p) {
        return rk4_step([&p](const State3<Scalar>& s) { return vector_field(p, s); }, x, h);
      },
      params);
}

/// Integration settings. `tau` and `burn_in` must be whole multiples of `step`.
template <typename Scalar = double>
struct IntegratorConfig {
  Scalar step = Scalar(0.001);
  Scalar burn_in = Scalar(100);
  State3<Scalar> initial_state = State3<Scalar>(1, 1, 1);
  Scalar tau = Scalar(0.5);
};

template <typename Scalar = double>
IntegratorConfig<Scalar> default_integrator_config(SystemKind kind) {
  IntegratorConfig<Scalar> cfg;
  switch (kind) {
    case SystemKind::kChua:
      cfg.initial_state = State3<Scalar>(0.1, 0, 0);
      cfg.tau = Scalar(1);
      break;
    case SystemKind::kLorenz:
      cfg.initial_state = State3<Scalar>(1, 1, 1);
      cfg.tau = Scalar(0.5);
      break;
    case SystemKind::kRossler:
      cfg.initial_state = State3<Scalar>(1, 1, 0);
      cfg.tau = Scalar(1);
      break;
  }
  return cfg;
}

/// Number of whole steps in `span`, or throws if `span` is not an integer
/// multiple of `step` (relative slack 1e-9).
template <typename Scalar>
std::size_t steps_in(Scalar span, Scalar step, const char* what) {
  using std::llround;
  using std::abs;
  const Scalar ratio = span / step;
  const long long n = llround(ratio);
  if (n < 0 || abs(ratio - Scalar(n)) > Scalar(1e-9) * std::max(Scalar(1), ratio)) {
    throw InvalidArgument(std::string(what) + " must be a non-negative integer multiple of the step");
  }
  return static_cast<std::size_t>(n);
}

template <typename Scalar = double>
struct Trajectory {
  SystemKind system = SystemKind::kLorenz;
  IntegratorConfig<Scalar> config;
  std::vector<Scalar> times;
  std::vector<State3<Scalar>, Eigen::aligned_allocator<State3<Scalar>>> states;

  std::size_t size() const { return states.size(); }
};

/// Discards `burn_in` time units, then records the state every `tau`,
/// `n_samples` times. The first sample is the state at t = burn_in.
template <typename Field, typename Scalar>
Trajectory<Scalar> integrate_field(const Field& field, SystemKind system,
                                   const IntegratorConfig<Scalar>& cfg,
                                   std::size_t n_samples) {
  if (n_samples < 1) throw InvalidArgument("integrate: n_samples must be >= 1");
  if (!(cfg.step > Scalar(0))) throw InvalidArgument("integrate: step must be positive");
  const std::size_t per_sample = steps_in(cfg.tau, cfg.step, "tau");
  const std::size_t burn_steps = steps_in(cfg.burn_in, cfg.step, "burn_in");
  if (per_sample == 0) throw InvalidArgument("integrate: tau must be positive");
  if (!all_finite(cfg.initial_state)) throw InvalidArgument("integrate: initial state not finite");

  Trajectory<Scalar> traj;
  traj.system = system;
  traj.config = cfg;
  traj.times.reserve(n_samples);
  traj.states.reserve(n_samples);

  State3<Scalar> x = cfg.initial_state;
  const Scalar h = cfg.step;
  auto check = [&](std::size_t step_index) {
    if (!all_finite(x)) {
      const double t = static_cast<double>(Scalar(step_index) * h);
      throw DivergenceError(std::string("integrate: ") + std::string(to_string(system)) +
                                " trajectory diverged at t=" + std::to_string(t),
                            t);
    }
  };

  std::size_t step_index = 0;
  for (std::size_t i = 0; i < burn_steps; ++i) {
    x = rk4_advance(field, x, h);
    check(++step_index);
  }
  for (std::size_t n = 0; n < n_samples; ++n) {
    if (n > 0) {
      for (std::size_t i = 0; i < per_sample; ++i) {
        x = rk4_advance(field, x, h);
        check(++step_index);
      }
    }
    traj.times.push_back(cfg.burn_in + Scalar(n) * cfg.tau);
    traj.states.push_back(x);
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> integrate(const SystemParams<Scalar>& params,
                             const IntegratorConfig<Scalar>& cfg, std::size_t n_samples) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        return integrate_field([&p](const State3<Scalar>& s) { return vector_field(p, s); },
                               P::kind, cfg, n_samples);
      },
      params);
}

template <typename Scalar = double>
SystemParams<Scalar> default_params(SystemKind kind) {
  switch (kind) {
    case SystemKind::kChua: return ChuaParams<Scalar>{};
    case SystemKind::kLorenz: return LorenzParams<Scalar>{};
    case SystemKind::kRossler: return RosslerParams<Scalar>{};
  }
  return LorenzParams<Scalar>{};
}

/// Scalar samples of coordinate `index` (1, 2 or 3), tagged with the
/// originating system and sampling distance.
inline Sequence extract_scalar(const Trajectory<double>& traj, int index) {
  if (index < 1 || index > 3) throw InvalidArgument("extract_scalar: coordinate must be 1, 2 or 3");
  Sequence seq;
  seq.values.resize(static_cast<Eigen::Index>(traj.size()));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    seq.values(static_cast<Eigen::Index>(i)) = traj.states[i](index - 1);
  }
  switch (traj.system) {
    case SystemKind::kChua: seq.spec.kind = SequenceKind::kChuaX1; break;
    case SystemKind::kLorenz: seq.spec.kind = SequenceKind::kLorenzX1; break;
    case SystemKind::kRossler: seq.spec.kind = SequenceKind::kRosslerX1; break;
  }
  seq.spec.tau = traj.config.tau;
  seq.spec.step = traj.config.step;
  seq.spec.burn_in = traj.config.burn_in;
  seq.coordinate = index;
  return seq;
}

}  // namespace chaoscs

#endif  // CHAOSCS_DYNAMICS_HPP
