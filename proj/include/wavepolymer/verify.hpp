#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavepolymer/field_radius.hpp"
#include "wavepolymer/localtime.hpp"
#include "wavepolymer/mode_dynamics.hpp"
#include "wavepolymer/spectrum.hpp"

namespace wavepolymer {

struct LemmaReport {
  std::string lemma_id;
  int n_cases = 0;
  double worst_margin = 0.0;  // min over cases; pass iff >= -tolerance
  double tolerance = 0.0;
  bool pass = false;
  std::string details;
};

// Quadrature of the Ito-isometry integral of the written mode kernels;
// the independent oracle for stationary_variance. Absolute tolerance 1e-10.
double variance_oracle(const ModeSpec& mode);

// sigma^2(x1, x2) = sum_{n>=1} Var[a_n] (phi_n(x1) - phi_n(x2))^2.
double pair_variance(const std::vector<ModeSpec>& modes, double x1, double x2);

// Scan of min sigma^2 J^2 / |x1 - x2| over random admissible pairs with
// |x1 - x2| in [h_floor*J, delta0*J]; stability checked against doubling the
// truncation. Spectrum is the power law gamma_n = sqrt(c / n^alpha).
LemmaReport check_variance_lower_bound(std::span<const double> J_grid,
                                       int n_pairs, int n_modes, double delta0,
                                       double c, double alpha,
                                       std::uint64_t seed,
                                       double h_floor = 0.01);

// Pathwise LHS <= RHS for the exponential-weight running-sup decomposition
// with 2*18^(k-m) block coefficients, on simulated Brownian paths sampled at
// the times e^{b t_i} (plus a uniform grid on [0, 1]). dt must divide 1.
LemmaReport check_brownian_decomposition(std::span<const int> T_values,
                                         int n_paths, double a, double b,
                                         double dt, std::uint64_t seed);

// I(sigma, gamma) = int_1^inf P(X >= sqrt(log x / gamma)) dx, X ~ N(0, sigma^2),
// against the bound sigma^2 gamma / sqrt(1 - 2 gamma sigma^2).
LemmaReport check_tail_integral_bound(std::span<const double> sigma_grid,
                                      std::span<const double> gamma_grid);
double tail_integral(double sigma, double gamma);
double tail_integral_bound(double sigma, double gamma);

// t^2 + 1 <= e^{0.9 t} on {0, step, ..., t_max}.
LemmaReport check_exp_quadratic(double t_max, double step);

// Discretized chain: with K = R(field) (or the given K when positive),
//   |{t : theta^2 <= 2K^2}| >= T/2,
//   on those slices |{x : |u - ubar| <= 2K}| >= J/2,
//   Phi >= T J^2/(32 K) (1 - eps_disc), eps_disc = bin_width / (2K).
// All three follow from Chebyshev with the shared quadrature weights, so the
// expected violation count is zero, not merely small.
LemmaReport check_jensen_chain(std::span<const FieldGrid> fields, double K,
                               const BinRule& rule);

}  // namespace wavepolymer
