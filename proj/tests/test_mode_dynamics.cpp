#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include <stdexcept>
#include "wavepolymer/mode_dynamics.hpp"

using namespace wavepolymer;

namespace {

ModeSpec make_mode(double J, int n, double gamma) {
  ModeSpec m;
  m.n = n;
  m.J = J;
  m.k = n * std::numbers::pi / J;
  m.lambda = -m.k * m.k;
  m.omega = 0.5 * std::sqrt(std::abs(4.0 * m.k * m.k - 1.0));
  m.regime = classify_regime(J, n);
  m.gamma = gamma;
  m.c = std::sqrt(2.0 / J);
  return m;
}

Eigen::Matrix2d expm_reference(const ModeSpec& m, double t) {
  Eigen::Matrix2d M;
  M << 0.0, 1.0, m.lambda, -1.0;
  return (M * t).exp();
}

}  // namespace

TEST_CASE("closed-form mean map equals the matrix exponential in all regimes") {
  const double twopi = 2.0 * std::numbers::pi;
  const ModeSpec cases[] = {
      make_mode(1.0, 1, 1.0),       // underdamped
      make_mode(twopi, 1, 1.0),     // critical, defective matrix
      make_mode(30.0, 1, 1.0),      // overdamped
      make_mode(4.0, 5, 0.3),       // deep underdamped
  };
  for (const auto& m : cases)
    for (double t : {1e-3, 0.1, 1.0, 3.0}) {
      const auto ker = build_transition(m, t);
      const Eigen::Matrix2d ref = expm_reference(m, t);
      CHECK((ker.mean_map - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stationary law solves the Lyapunov equation") {
  for (const auto& m :
       {make_mode(1.0, 1, 1.0), make_mode(2.0 * std::numbers::pi, 1, 0.7),
        make_mode(30.0, 1, 2.0)}) {
    const auto law = stationary_variance(m);
    CHECK(law.var_a ==
          doctest::Approx(m.gamma * m.gamma / (2.0 * m.k * m.k)).epsilon(1e-12));
    CHECK(law.var_v == doctest::Approx(m.gamma * m.gamma / 2.0).epsilon(1e-12));
    CHECK(law.cov_av == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(stationary_variance(make_mode(1.0, 0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("Chapman-Kolmogorov: composing two half steps is one full step") {
  const double twopi = 2.0 * std::numbers::pi;
  for (const auto& m :
       {make_mode(1.0, 1, 1.0), make_mode(twopi, 1, 1.0),
        make_mode(30.0, 1, 1.0)}) {
    for (double dt : {1e-3, 1e-2, 1e-1}) {
      const auto k1 = build_transition(m, dt);
      const auto k2 = build_transition(m, 2.0 * dt);
      const Eigen::Matrix2d A2 = k1.mean_map * k1.mean_map;
      const Eigen::Matrix2d Q2 =
          k1.mean_map * k1.cov * k1.mean_map.transpose() + k1.cov;
      const double scale = k2.cov.cwiseAbs().maxCoeff();
      CHECK((A2 - k2.mean_map).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((Q2 - k2.cov).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("transition covariance matches the stationary fixed point") {
  // Stationarity: Q(dt) = S - A S A^T for the Lyapunov solution S.
  const auto m = make_mode(1.5, 2, 0.8);
  const auto law = stationary_variance(m);
  Eigen::Matrix2d S;
  S << law.var_a, law.cov_av, law.cov_av, law.var_v;
  const auto ker = build_transition(m, 0.37);
  const Eigen::Matrix2d residual =
      ker.mean_map * S * ker.mean_map.transpose() + ker.cov - S;
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forcing integral matches fine quadrature of e^{Ms}(0,1)") {
  for (const auto& m : {make_mode(1.0, 1, 1.0), make_mode(30.0, 1, 1.0)}) {
    const double dt = 0.5;
    const auto ker = build_transition(m, dt);
    const int n = 20000;
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
      const double s = (i + 0.5) * dt / n;
      acc += expm_reference(m, s).col(1) * (dt / n);
    }
    CHECK((acc - ker.forcing).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("zero mode: velocity relaxes, position integrates it") {
  const auto ker = build_zero_mode_transition(1.0, 0.25);
  CHECK(ker.mean_map(0, 0) == doctest::Approx(1.0));
  CHECK(ker.mean_map(1, 1) == doctest::Approx(std::exp(-0.25)));
  CHECK(ker.mean_map(1, 0) == doctest::Approx(0.0).scale(1.0));
  RngStream rng(3, 17);
  const auto path = evolve_zero_mode(1.0, ModeState{0.0, 0.0}, 0.25, 40, rng);
  CHECK(path.states.size() == 41);
  CHECK(path.mode_index == 0);
}

TEST_CASE("empirical stationary variance stays stationary along a path") {
  const auto m = make_mode(1.0, 1, 1.0);
  const auto ker = build_transition(m, 0.05);
  RngStream rng(11, 5);
  const int n_rep = 4000;
  double sum_a2 = 0.0, sum_v2 = 0.0;
  for (int r = 0; r < n_rep; ++r) {
    const auto init = sample_stationary(m, rng);
    const auto path = evolve_path(m, init, ker, 20, rng);
    const auto& last = path.states.back();
    sum_a2 += last.a * last.a;
    sum_v2 += last.v * last.v;
  }
  const auto law = stationary_variance(m);
  // 4 MC standard errors of a chi^2 mean
  const double se_a = law.var_a * std::sqrt(2.0 / n_rep);
  const double se_v = law.var_v * std::sqrt(2.0 / n_rep);
  CHECK(std::abs(sum_a2 / n_rep - law.var_a) < 4.0 * se_a);
  CHECK(std::abs(sum_v2 / n_rep - law.var_v) < 4.0 * se_v);
}

TEST_CASE("tilted stationary mean sits at a/k^2") {
  const auto m = make_mode(std::numbers::pi, 1, 1.0);  // k = 1
  RngStream rng(2, 9);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += sample_stationary_tilted(m, 0.7, rng).a;
  mean /= n;
  const double se = std::sqrt(stationary_variance(m).var_a / n);
  CHECK(std::abs(mean - 0.7) < 4.0 * se);
}

TEST_CASE("recorded Brownian increments are jointly consistent") {
  // Var[dW] = dt and Cov[state noise, dW] = gamma * forcing, estimated over
  // many one-step transitions.
  const auto m = make_mode(1.0, 1, 1.0);
  const double dt = 0.1;
  const auto ker = build_transition(m, dt);
  RngStream rng(5, 23);
  const int n = 200000;
  double var_dw = 0.0, cov_a = 0.0, cov_v = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto path =
        evolve_path(m, ModeState{0.0, 0.0}, ker, 1, rng, 0.0, true);
    const double dw = path.dW[0];
    var_dw += dw * dw;
    cov_a += path.states[1].a * dw;
    cov_v += path.states[1].v * dw;
  }
  CHECK(var_dw / n == doctest::Approx(dt).epsilon(0.02));
  CHECK(cov_a / n == doctest::Approx(ker.gamma * ker.forcing(0)).epsilon(0.05));
  CHECK(cov_v / n == doctest::Approx(ker.gamma * ker.forcing(1)).epsilon(0.05));
}

TEST_CASE("tilt gate") {
  CHECK_NOTHROW(check_tilt(TiltParams{0.5, 1}));
  CHECK_THROWS_AS(check_tilt(TiltParams{0.5, 2}), std::invalid_argument);
}
