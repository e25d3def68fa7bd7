#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wavepolymer/rng.hpp"
#include "wavepolymer/spectrum.hpp"

namespace wavepolymer {

struct ModeState {
  double a = 0.0;  // oscillator position (the mode coefficient)
  double v = 0.0;  // velocity
};

struct StationaryLaw {
  double var_a = 0.0;
  double var_v = 0.0;
  double cov_av = 0.0;
};

// Exact one-step law of the linear-Gaussian mode dynamics over dt:
//   state' ~ N(mean_map * state + tilt_a * forcing, cov)
// cov is the Van Loan integral of e^{Ms} aa^T e^{M^T s}; forcing is the
// integrated unit response M^{-1}(e^{M dt} - I)(0,1)^T.
struct TransitionKernel {
  Eigen::Matrix2d mean_map = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  Eigen::Vector2d forcing = Eigen::Vector2d::Zero();
  // Lower-triangular factor of the joint law of (noise term, Brownian
  // increment); the third column/row exists so paths can record the exact
  // W increments that drove them (Girsanov needs them).
  Eigen::Matrix3d joint_chol = Eigen::Matrix3d::Zero();
  double dt = 0.0;
  double gamma = 0.0;
};

struct ModePath {
  int mode_index = 0;
  std::vector<ModeState> states;
  std::vector<double> dW;  // Brownian increments, filled when recording
  std::uint64_t rng_stream_id = 0;
};

struct TiltParams {
  double a = 0.0;
  int target_mode = 1;
};

// Stationary covariance of (a, v): the Lyapunov fixed point of the mode SDE.
// Rejects n = 0 (the zero mode has no stationary position law).
StationaryLaw stationary_variance(const ModeSpec& mode);

TransitionKernel build_transition(const ModeSpec& mode, double dt);

// Transition kernel of the zero mode (lambda = 0); position is nonstationary.
TransitionKernel build_zero_mode_transition(double gamma0, double dt);

ModeState sample_stationary(const ModeSpec& mode, RngStream& rng);

// Stationary draw under the constant tilt a on this mode: same covariance,
// mean shifted to the steady state (-M^{-1}(0,a)^T).
ModeState sample_stationary_tilted(const ModeSpec& mode, double tilt_a,
                                   RngStream& rng);

// Markov evolution with the exact kernel. tilt_a adds the deterministic
// forcing (drift a/gamma inside the Brownian integral). record_noise stores
// the underlying W increments, jointly consistent with the sampled states.
ModePath evolve_path(const ModeSpec& mode, ModeState init,
                     const TransitionKernel& kernel, int n_t, RngStream& rng,
                     double tilt_a = 0.0, bool record_noise = false);

ModePath evolve_zero_mode(double gamma0, ModeState init, double dt, int n_t,
                          RngStream& rng);

// Validates the tilt target; throws for modes != 1.
void check_tilt(const TiltParams& tilt);

}  // namespace wavepolymer
