#include <doctest.h>

#include <cmath>
#include <numbers>

#include <stdexcept>
#include "wavepolymer/girsanov.hpp"

using namespace wavepolymer;

namespace {

DomainConfig girsanov_cfg(double J) {
  DomainConfig cfg;
  cfg.J = J;
  cfg.T = 1.0;
  cfg.n_modes = 5;
  cfg.n_x = 32;
  cfg.n_t = 50;
  return cfg;
}

std::vector<ModeSpec> girsanov_modes(const DomainConfig& cfg, double c = 1.0,
                                     double alpha = 2.0) {
  auto modes = build_eigenbasis(cfg);
  attach_spectrum(modes, c, alpha, SpectrumProfile::PowerLaw);
  std::vector<ModeSpec> nz;
  for (const auto& m : modes)
    if (m.n >= 1) nz.push_back(m);
  return nz;
}

}  // namespace

TEST_CASE("quadrature inner product recovers gamma_1^2") {
  const auto cfg = girsanov_cfg(1.7);
  for (double c : {1.0, 2.5}) {
    const auto modes = girsanov_modes(cfg, c, 2.0);
    const double g1 = modes[0].gamma;
    CHECK(noise_inner_product_phi1(modes) ==
          doctest::Approx(g1 * g1).epsilon(1e-10));
  }
}

TEST_CASE("log_zeta: quadratic in a, zero at a=0") {
  const auto cfg = girsanov_cfg(1.0);
  const auto modes = girsanov_modes(cfg);
  CHECK(log_zeta(0.0, 2.0, modes) == 0.0);
  const double z1 = log_zeta(1.0, 2.0, modes);
  const double z2 = log_zeta(2.0, 2.0, modes);
  CHECK(z2 / z1 == doctest::Approx(4.0).epsilon(1e-12));
  // orthonormal truncation: log zeta = a^2 T gamma_1^2 / 2
  const double g1 = modes[0].gamma;
  CHECK(z1 == doctest::Approx(2.0 * g1 * g1 / 2.0).epsilon(1e-8));
}

TEST_CASE("log_density is zero at a=0 and linear-quadratic in a") {
  const auto cfg = girsanov_cfg(1.0);
  const auto modes = girsanov_modes(cfg);
  const std::vector<double> dW = {0.1, -0.2, 0.3};
  CHECK(log_density(dW, 0.0, 1.0, modes[0]) == 0.0);
  const double g1 = modes[0].gamma;
  const double expect = 0.5 * g1 * 0.2 - 0.5 * 0.25 * g1 * g1 * 1.0;
  CHECK(log_density(dW, 0.5, 1.0, modes[0]) ==
        doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(log_density(dW, 0.5, 1.0, modes[1]), std::invalid_argument);
}

TEST_CASE("exp(log_density) has unit mean under the prior") {
  const auto cfg = girsanov_cfg(1.0);
  const auto modes = girsanov_modes(cfg);
  const auto kernel = build_transition(modes[0], cfg.dt());
  RngStream rng(21, 0);
  for (double a : {0.25, 1.0}) {
    const int n = 4000;
    double mean = 0.0, sq = 0.0;
    for (int r = 0; r < n; ++r) {
      const auto init = sample_stationary(modes[0], rng);
      const auto path =
          evolve_path(modes[0], init, kernel, cfg.n_t, rng, 0.0, true);
      const double d = std::exp(log_density(path.dW, a, cfg.T, modes[0]));
      mean += d;
      sq += d * d;
    }
    mean /= n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
  }
}

TEST_CASE("tilted and reweighted estimators agree (underdamped J=pi)") {
  const auto cfg = girsanov_cfg(std::numbers::pi);
  const auto modes = girsanov_modes(cfg);
  RngStream rng(22, 0);
  const auto rep = tilt_consistency(TiltFunctional::ModeOneTimeAverage, 0.5,
                                    3000, modes, cfg, rng);
  CHECK(rep.consistency_pass);
  CHECK(std::abs(rep.martingale_mean - 1.0) < 4.0 * rep.martingale_se);
  // oracle: deterministic mean recursion from a zero-mean (untilted) start
  const double tilt = tilt_forcing_coefficient(0.5, modes[0]);
  const auto kernel = build_transition(modes[0], cfg.dt());
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  const auto w = time_weights(cfg.n_t);
  double expect = 0.0;
  for (int i = 0; i <= cfg.n_t; ++i) {
    expect += w[i] * mean(0);
    mean = kernel.mean_map * mean + tilt * kernel.forcing;
  }
  CHECK(std::abs(rep.tilted_mean - expect) < 5.0 * rep.tilted_se);

  RngStream rng2(22, 1);
  const auto rep2 =
      tilt_consistency(TiltFunctional::Radius, 0.5, 1500, modes, cfg, rng2);
  CHECK(rep2.consistency_pass);
}

TEST_CASE("zT lower bound holds on a small instance") {
  DomainConfig cfg = girsanov_cfg(1.0);
  cfg.T = 2.0;
  cfg.n_t = 80;
  const auto modes = girsanov_modes(cfg);
  RngStream rng(23, 0);
  const auto rep = zt_lower_bound_report(0.25, 0.3, cfg, modes, 400,
                                         BinRule{128}, rng);
  CHECK(rep.margin > -4.0 * rep.rhs_se);
  CHECK(rep.ess >= 1.0);

  RngStream rng2(23, 1);
  const auto trivial = zt_lower_bound_report(0.0, 0.0, cfg, modes, 50,
                                             BinRule{128}, rng2);
  CHECK(trivial.lhs == doctest::Approx(0.0).scale(1.0));
  CHECK(trivial.rhs == doctest::Approx(0.0).scale(1.0));
}
