#include "wavepolymer/mode_dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace wavepolymer {

namespace {

Eigen::Matrix2d system_matrix(double lambda) {
  Eigen::Matrix2d M;
  M << 0.0, 1.0, lambda, -1.0;
  return M;
}

// Closed-form e^{Mt} per regime. The Critical (defective) case never goes
// through diagonalization.
Eigen::Matrix2d mean_map_closed_form(const ModeSpec& mode, double t) {
  Eigen::Matrix2d A;
  switch (mode.regime) {
    case Regime::Critical: {
      const double e = std::exp(-0.5 * t);
      A << (4.0 + 2.0 * t) * 0.25 * e, 4.0 * t * 0.25 * e,
           -t * 0.25 * e, (4.0 - 2.0 * t) * 0.25 * e;
      return A;
    }
    case Regime::Overdamped: {
      const double w = 2.0 * mode.omega;  // sqrt(1 - 4k^2)
      const double rp = 0.5 * (-1.0 + w);
      const double rm = 0.5 * (-1.0 - w);
      const Eigen::Matrix2d M = system_matrix(mode.lambda);
      const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
      return (std::exp(rp * t) * (M - rm * I) - std::exp(rm * t) * (M - rp * I)) /
             (rp - rm);
    }
    case Regime::Underdamped: {
      const double w = mode.omega;  // sqrt(4k^2 - 1)/2
      const double e = std::exp(-0.5 * t);
      const double s = std::sin(w * t), c = std::cos(w * t);
      A << e * (c + 0.5 * s / w), e * s / w,
           -e * (w + 0.25 / w) * s, e * (c - 0.5 * s / w);
      return A;
    }
  }
  return Eigen::Matrix2d::Identity();
}

// Symmetric PSD factor via eigendecomposition with negative-eigenvalue clamp.
template <typename Mat>
Mat psd_factor(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  auto vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) vals(i) = std::max(vals(i), 0.0);
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

TransitionKernel make_kernel(const Eigen::Matrix2d& M, const Eigen::Matrix2d& A,
                             double gamma, double dt) {
  TransitionKernel ker;
  ker.mean_map = A;
  ker.dt = dt;
  ker.gamma = gamma;

  // Van Loan block exponential for the noise covariance.
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
  S(1, 1) = gamma * gamma;
  Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
  H.block<2, 2>(0, 0) = -M;
  H.block<2, 2>(0, 2) = S;
  H.block<2, 2>(2, 2) = M.transpose();
  const Eigen::Matrix4d E = (H * dt).exp();
  Eigen::Matrix2d Q = E.block<2, 2>(2, 2).transpose() * E.block<2, 2>(0, 2);
  ker.cov = 0.5 * (Q + Q.transpose());

  // Integrated unit forcing int_0^dt e^{Ms} (0,1)^T ds via augmented exponential
  // (M may be singular for the zero mode).
  Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
  G.block<2, 2>(0, 0) = M;
  G(1, 2) = 1.0;
  const Eigen::Matrix3d Ge = (G * dt).exp();
  ker.forcing = Ge.block<2, 1>(0, 2);

  // Joint law of (noise term, Brownian increment): cross-covariance is
  // gamma * forcing, Var[dW] = dt.
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  sigma.block<2, 2>(0, 0) = ker.cov;
  sigma.block<2, 1>(0, 2) = gamma * ker.forcing;
  sigma.block<1, 2>(2, 0) = gamma * ker.forcing.transpose();
  sigma(2, 2) = dt;
  ker.joint_chol = psd_factor(sigma);
  return ker;
}

ModePath evolve_with_kernel(int mode_index, ModeState init,
                            const TransitionKernel& kernel, int n_t,
                            RngStream& rng, double tilt_a, bool record_noise) {
  ModePath path;
  path.mode_index = mode_index;
  path.rng_stream_id = rng.stream_id();
  path.states.reserve(n_t + 1);
  path.states.push_back(init);
  if (record_noise) path.dW.reserve(n_t);

  Eigen::Vector2d x(init.a, init.v);
  for (int i = 0; i < n_t; ++i) {
    Eigen::Vector3d z(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Vector3d noise = kernel.joint_chol * z;
    x = kernel.mean_map * x + tilt_a * kernel.forcing + noise.head<2>();
    if (!(std::isfinite(x(0)) && std::isfinite(x(1))))
      throw std::runtime_error("evolve_path: non-finite state");
    path.states.push_back({x(0), x(1)});
    if (record_noise) path.dW.push_back(noise(2));
  }
  return path;
}

}  // namespace

StationaryLaw stationary_variance(const ModeSpec& mode) {
  if (mode.n == 0)
    throw std::invalid_argument(
        "stationary_variance: zero mode has no stationary law");
  // Lyapunov equation M S + S M^T + aa^T = 0 in (s11, s12, s22).
  const double lam = mode.lambda;
  Eigen::Matrix3d C;
  Eigen::Vector3d rhs;
  C << 0.0, 2.0, 0.0,
       lam, -1.0, 1.0,
       0.0, 2.0 * lam, -2.0;
  rhs << 0.0, 0.0, -mode.gamma * mode.gamma;
  const Eigen::Vector3d s = C.colPivHouseholderQr().solve(rhs);
  return {s(0), s(2), s(1)};
}

TransitionKernel build_transition(const ModeSpec& mode, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_transition: dt must be positive");
  const Eigen::Matrix2d M = system_matrix(mode.lambda);
  return make_kernel(M, mean_map_closed_form(mode, dt), mode.gamma, dt);
}

TransitionKernel build_zero_mode_transition(double gamma0, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_transition: dt must be positive");
  Eigen::Matrix2d A;
  const double e = std::exp(-dt);
  A << 1.0, 1.0 - e, 0.0, e;
  return make_kernel(system_matrix(0.0), A, gamma0, dt);
}

ModeState sample_stationary(const ModeSpec& mode, RngStream& rng) {
  return sample_stationary_tilted(mode, 0.0, rng);
}

ModeState sample_stationary_tilted(const ModeSpec& mode, double tilt_a,
                                   RngStream& rng) {
  const StationaryLaw law = stationary_variance(mode);
  Eigen::Matrix2d sigma;
  sigma << law.var_a, law.cov_av, law.cov_av, law.var_v;
  const Eigen::Matrix2d L = psd_factor(sigma);
  Eigen::Vector2d z(rng.normal(), rng.normal());
  Eigen::Vector2d x = L * z;
  if (tilt_a != 0.0) {
    // Steady state of the forced system: -M^{-1} (0, a)^T = (a/k^2, 0).
    x(0) += tilt_a / (mode.k * mode.k);
  }
  return {x(0), x(1)};
}

ModePath evolve_path(const ModeSpec& mode, ModeState init,
                     const TransitionKernel& kernel, int n_t, RngStream& rng,
                     double tilt_a, bool record_noise) {
  return evolve_with_kernel(mode.n, init, kernel, n_t, rng, tilt_a, record_noise);
}

ModePath evolve_zero_mode(double gamma0, ModeState init, double dt, int n_t,
                          RngStream& rng) {
  const TransitionKernel kernel = build_zero_mode_transition(gamma0, dt);
  return evolve_with_kernel(0, init, kernel, n_t, rng, 0.0, false);
}

void check_tilt(const TiltParams& tilt) {
  if (tilt.target_mode != 1)
    throw std::invalid_argument("tilt: only mode 1 may carry a drift");
}

}  // namespace wavepolymer
