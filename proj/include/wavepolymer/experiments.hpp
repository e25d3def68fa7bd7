#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavepolymer/gibbs.hpp"

namespace wavepolymer {

struct SweepPoint {
  double J = 0.0;
  double beta = 0.0;
  double T = 0.0;
  double q_radius_mean = 0.0;
  double q_radius_se = 0.0;
  double ess = 0.0;
  std::string sampler;  // "is" or "pcn"
  double envelope_prob = 0.0;  // Q(R in [eps J^{5/3}, K J^{5/3}])
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SweepConfig {
  DomainConfig cfg_template;   // J is overridden per point
  double beta = 1.0;
  int n_replicas = 512;
  double ess_floor = 32.0;     // below this, fall back to pCN
  int pcn_steps = 4096;
  double pcn_rho = 0.25;
  BinRule bins;
  double envelope_eps = 0.25;  // envelope constants, reported not asserted
  double envelope_K = 4.0;
  int n_threads = 1;
};

// One Q-estimate of E[R] per J: importance sampling from prior replicas,
// pCN fallback when the effective sample size drops below the floor.
// Deterministic for fixed (config, seed) independent of n_threads: replica
// streams are keyed by (point index, replica index).
std::vector<SweepPoint> run_sweep(std::span<const double> J_values,
                                  const SweepConfig& sc, std::uint64_t seed);

ScalingFit fit_exponent(std::span<const SweepPoint> points);
ScalingFit fit_exponent_xy(std::span<const double> log_j,
                           std::span<const double> log_r);

// Solves J^{p1} R^{q1} = J^{p2} R^{q2} for the exponent of R = J^e exactly.
boost::rational<long long> heuristic_exponent(
    boost::rational<long long> lhs_J_power,
    boost::rational<long long> lhs_R_power,
    boost::rational<long long> rhs_J_power,
    boost::rational<long long> rhs_R_power);

// Energy (1/2) int (u'')^2 dx of the piecewise-quadratic Neumann profile with
// u(0) = R, u(J) = -R and |u''| = 8R/J^2; equals 32 R^2 / J^3.
double neumann_minimizer_check(double R, double J);

}  // namespace wavepolymer
