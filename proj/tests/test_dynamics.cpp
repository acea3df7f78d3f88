// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/dynamics.hpp"
#include "chaoscs/seeding.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace chaoscs;
using State = State3<double>;

namespace {

State random_state(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return State(u(rng), u(rng), u(rng));
}

State lorenz_fixed_point() {
  const double xy = std::sqrt(178.4);
  return State(xy, xy, 44.6);
}

// Endpoint of the Lorenz flow after `steps` RK4 steps of size h.
State lorenz_endpoint(const State& x0, double h, long steps) {
  const LorenzParams<double> p;
  auto field = [&p](const State& s) { return vector_field(p, s); };
  State x = x0;
  for (long i = 0; i < steps; ++i) x = rk4_advance(field, x, h);
  return x;
}

}  // namespace

TEST_CASE("chua nonlinearity") {
  const ChuaParams<double> p;
  CHECK(chua_nonlinearity(0.0, p) == 0.0);
  CHECK(chua_nonlinearity(1.0, p) == doctest::Approx(-1.27).epsilon(1e-15));
  CHECK(chua_nonlinearity(-1.0, p) == doctest::Approx(1.27).epsilon(1e-15));
  // Outer segment has slope b.
  CHECK(chua_nonlinearity(3.0, p) - chua_nonlinearity(2.0, p) == doctest::Approx(-0.68));
}

TEST_CASE("default parameters") {
  const ChuaParams<double> chua;
  CHECK(chua.a == -1.27);
  CHECK(chua.b == -0.68);
  CHECK(chua.alpha == 10.0);
  CHECK(chua.beta == 14.87);
  const LorenzParams<double> lorenz;
  CHECK(lorenz.sigma == 16.0);
  CHECK(lorenz.r == 45.6);
  CHECK(lorenz.b == 4.0);
  const RosslerParams<double> rossler;
  CHECK(rossler.a == 0.2);
  CHECK(rossler.b == 0.2);
  CHECK(rossler.c == 5.7);
}

TEST_CASE("vector fields at known points") {
  const State origin = State::Zero();
  CHECK(vector_field(LorenzParams<double>{}, origin).isZero());

  const State at_fixed = vector_field(LorenzParams<double>{}, lorenz_fixed_point());
  CHECK(at_fixed.cwiseAbs().maxCoeff() < 1e-12);

  const State rossler = vector_field(RosslerParams<double>{}, origin);
  CHECK(rossler(0) == 0.0);
  CHECK(rossler(1) == 0.0);
  CHECK(rossler(2) == doctest::Approx(0.2));

  const SystemParams<double> variant = RosslerParams<double>{};
  CHECK(vector_field(variant, origin) == rossler);
}

TEST_CASE("rk4_step") {
  SUBCASE("zero field leaves the state unchanged") {
    auto zero = [](const State&) { return State::Zero().eval(); };
    const State x(0.3, -1.2, 7.0);
    CHECK(rk4_step(zero, x, 0.01) == x);
  }
  SUBCASE("Lorenz fixed point is preserved") {
    const State x = lorenz_fixed_point();
    const State next = rk4_step(SystemParams<double>{LorenzParams<double>{}}, x, 0.001);
    CHECK((next - x).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("one step matches a fine-step reference") {
    const State x0(1, 1, 1);
    const State coarse = rk4_step(SystemParams<double>{LorenzParams<double>{}}, x0, 0.001);
    const State fine = lorenz_endpoint(x0, 1e-6, 1000);
    CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("non-finite result is a divergence") {
    auto blowup = [](const State&) {
      return State::Constant(std::numeric_limits<double>::infinity()).eval();
    };
    CHECK_THROWS_AS(rk4_step(blowup, State(1, 1, 1), 0.1), DivergenceError);
  }
  SUBCASE("step must be positive") {
    CHECK_THROWS_AS(rk4_step(SystemParams<double>{LorenzParams<double>{}}, State(1, 1, 1), 0.0),
                    InvalidArgument);
  }
}

TEST_CASE("integrate") {
  SUBCASE("single sample without burn-in is the initial state") {
    IntegratorConfig<double> cfg;
    cfg.burn_in = 0;
    cfg.initial_state = State(0.5, -0.25, 2.0);
    const auto traj = integrate(SystemParams<double>{LorenzParams<double>{}}, cfg, 1);
    REQUIRE(traj.size() == 1);
    CHECK(traj.states[0] == cfg.initial_state);
    CHECK(traj.times[0] == 0.0);
  }
  SUBCASE("times are spaced by tau after the burn-in") {
    auto cfg = default_integrator_config<double>(SystemKind::kRossler);
    cfg.burn_in = 5;
    cfg.tau = 0.25;
    const auto traj = integrate(default_params<double>(SystemKind::kRossler), cfg, 8);
    REQUIRE(traj.size() == 8);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      CHECK(traj.times[i] == doctest::Approx(5.0 + 0.25 * static_cast<double>(i)));
    }
    CHECK(traj.system == SystemKind::kRossler);
  }
  SUBCASE("Chua stays on a bounded attractor") {
    const auto cfg = default_integrator_config<double>(SystemKind::kChua);
    const auto traj = integrate(default_params<double>(SystemKind::kChua), cfg, 10000);
    double worst = 0.0;
    for (const auto& s : traj.states) worst = std::max(worst, std::abs(s(0)));
    CHECK(worst < 10.0);
  }
  SUBCASE("Lorenz x3 has positive mean") {
    const auto cfg = default_integrator_config<double>(SystemKind::kLorenz);
    const auto traj = integrate(default_params<double>(SystemKind::kLorenz), cfg, 10000);
    double sum = 0.0;
    for (const auto& s : traj.states) sum += s(2);
    CHECK(sum / static_cast<double>(traj.size()) > 0.0);
  }
  SUBCASE("divergence reports the failure time") {
    // x' = x^2 from x = 1 blows up at t = 1.
    auto quadratic = [](const State& s) { return State(s(0) * s(0), 0, 0); };
    IntegratorConfig<double> cfg;
    cfg.burn_in = 0;
    cfg.tau = 0.01;
    cfg.initial_state = State(1, 0, 0);
    try {
      integrate_field(quadratic, SystemKind::kLorenz, cfg, 1000);
      FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
      CHECK(e.time() > 0.9);
      CHECK(e.time() < 1.1);
    }
  }
  SUBCASE("tau must be a whole number of steps") {
    IntegratorConfig<double> cfg;
    cfg.tau = 0.0015;
    CHECK_THROWS_AS(integrate(SystemParams<double>{LorenzParams<double>{}}, cfg, 3),
                    InvalidArgument);
    cfg.tau = 0.5;
    cfg.burn_in = 0.0005;
    CHECK_THROWS_AS(integrate(SystemParams<double>{LorenzParams<double>{}}, cfg, 3),
                    InvalidArgument);
  }
  SUBCASE("n_samples must be positive") {
    CHECK_THROWS_AS(integrate(SystemParams<double>{LorenzParams<double>{}},
                              IntegratorConfig<double>{}, 0),
                    InvalidArgument);
  }
}

TEST_CASE("extract_scalar") {
  IntegratorConfig<double> cfg;
  cfg.burn_in = 0;
  cfg.tau = 0.01;
  cfg.initial_state = State(0.7, 0.1, -0.2);

  const auto one = integrate(SystemParams<double>{LorenzParams<double>{}}, cfg, 1);
  const Sequence s1 = extract_scalar(one, 1);
  REQUIRE(s1.size() == 1);
  CHECK(s1.values(0) == 0.7);
  CHECK(s1.spec.kind == SequenceKind::kLorenzX1);
  CHECK(*s1.spec.tau == 0.01);

  const auto ten = integrate(SystemParams<double>{LorenzParams<double>{}}, cfg, 10);
  const Sequence s3 = extract_scalar(ten, 3);
  REQUIRE(s3.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(s3.values(i) == ten.states[static_cast<std::size_t>(i)](2));
  CHECK(s3.coordinate == 3);

  CHECK_THROWS_AS(extract_scalar(ten, 0), InvalidArgument);
  CHECK_THROWS_AS(extract_scalar(ten, 4), InvalidArgument);

  const auto chua = integrate(default_params<double>(SystemKind::kChua),
                              default_integrator_config<double>(SystemKind::kChua), 500);
  const Sequence sc = extract_scalar(chua, 1);
  const double mean = sc.values.mean();
  CHECK((sc.values.array() - mean).square().mean() > 0.0);
}

TEST_CASE("fourth-order convergence on Lorenz") {
  const State x0(1, 1, 1);
  const State reference = lorenz_endpoint(x0, 1e-6, 1000000);
  const double err_coarse = (lorenz_endpoint(x0, 1e-3, 1000) - reference).norm();
  const double err_fine = (lorenz_endpoint(x0, 5e-4, 2000) - reference).norm();
  const double ratio = err_coarse / err_fine;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("symmetries of the fields") {
  Rng rng(2024);
  const ChuaParams<double> chua;
  const LorenzParams<double> lorenz;
  for (int i = 0; i < 1000; ++i) {
    const State x = random_state(rng, 5.0);
    CHECK(vector_field(chua, State(-x)) == State(-vector_field(chua, x)));

    const State mirrored(-x(0), -x(1), x(2));
    const State f = vector_field(lorenz, x);
    CHECK(vector_field(lorenz, mirrored) == State(-f(0), -f(1), f(2)));
  }
}

TEST_CASE("integration is deterministic") {
  const auto params = default_params<double>(SystemKind::kChua);
  const auto cfg = default_integrator_config<double>(SystemKind::kChua);
  const auto a = integrate(params, cfg, 200);
  const auto b = integrate(params, cfg, 200);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.states[i] == b.states[i]);
    CHECK(a.times[i] == b.times[i]);
  }
}
