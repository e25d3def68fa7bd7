#pragma once

#include <span>
#include <vector>

#include "wavepolymer/field_radius.hpp"
#include "wavepolymer/gibbs.hpp"
#include "wavepolymer/mode_dynamics.hpp"
#include "wavepolymer/spectrum.hpp"

namespace wavepolymer {

// Spatial inner product (phi_1, f phi_1) = int int phi_1(x) phi_1(y) f(x,y)
// dx dy computed by quadrature over the noise covariance; equals gamma_1^2 by
// orthonormality. Kept as the independent oracle for sigma_X^2 / log zeta.
double noise_inner_product_phi1(const std::vector<ModeSpec>& modes,
                                int n_quad = 2048);

// Var[F(T, phi_1)] = T * (phi_1, f phi_1).
double sigma_x_sq(double T, const std::vector<ModeSpec>& modes,
                  int n_quad = 2048);

// log dP^_T^a/dP_T for one realization: a * gamma_1 * W_1(T) - (a^2/2) sigma_X^2.
// dW must be the recorded mode-1 Brownian increments over [0, T].
double log_density(std::span<const double> dW, double a, double T,
                   const ModeSpec& mode1);

// log zeta^(T, a) = (a^2/2) * sigma_X^2, via the quadrature oracle.
double log_zeta(double a, double T, const std::vector<ModeSpec>& modes);

// Drift coefficient entering the mode-1 SDE under the tilt whose density is
// log_density above: the Girsanov shift is dW -> dW + a*gamma_1 dt, which adds
// a*gamma_1^2 times the unit forcing to the mode dynamics.
double tilt_forcing_coefficient(double a, const ModeSpec& mode1);

enum class TiltFunctional {
  ModeOneTimeAverage,  // time average of a_1(t)
  Radius,
};

struct TiltReport {
  double a = 0.0;
  double tilted_mean = 0.0;
  double tilted_se = 0.0;
  double reweighted_mean = 0.0;
  double reweighted_se = 0.0;
  double martingale_mean = 0.0;  // mean of exp(log_density) under P
  double martingale_se = 0.0;
  bool consistency_pass = false;  // |difference| <= 4 combined SE
};

TiltReport tilt_consistency(TiltFunctional functional, double a, int n_replicas,
                            const std::vector<ModeSpec>& modes,
                            const DomainConfig& cfg, RngStream& rng);

struct ZTBoundReport {
  double beta = 0.0;
  double a = 0.0;
  double lhs = 0.0;       // (1/T) log z_hat
  double rhs = 0.0;       // -beta * E^[phi/T] - (1/T) log zeta^
  double rhs_se = 0.0;
  double margin = 0.0;    // lhs - rhs
  double ess = 0.0;
};

// Both sides of (1/T) log Z_T >= -beta E^[int l_0^2 dy] - (1/T) log zeta^.
// The tilted expectation uses the per-slice time average Phi/T (stationarity).
ZTBoundReport zt_lower_bound_report(double beta, double a,
                                    const DomainConfig& cfg,
                                    const std::vector<ModeSpec>& modes,
                                    int n_replicas, const BinRule& rule,
                                    RngStream& rng);

}  // namespace wavepolymer
