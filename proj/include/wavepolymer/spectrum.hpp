#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wavepolymer {

struct DomainConfig {
  double J = 1.0;       // interval length
  double T = 1.0;       // time horizon
  int n_modes = 16;     // spectral truncation N
  int n_x = 128;        // spatial cells (midpoint grid)
  int n_t = 100;        // time steps
  std::uint64_t seed = 0;

  double dt() const { return T / n_t; }
  // Throws std::invalid_argument naming the offending constraint.
  void validate() const;
};

enum class Regime { Overdamped, Critical, Underdamped };

// Per-mode constants of the damped oscillator a_n'' + a_n' = lambda_n a_n + noise.
// omega is sqrt(|4k^2-1|)/2, the imaginary part of the characteristic roots in
// the underdamped regime; the overdamped decay split is 2*omega.
struct ModeSpec {
  int n = 0;
  double J = 1.0;
  double lambda = 0.0;  // -(n pi / J)^2
  double k = 0.0;       // n pi / J
  double omega = 0.0;   // sqrt(|4k^2 - 1|)/2
  Regime regime = Regime::Overdamped;
  double gamma = 0.0;   // noise amplitude, set by attach_spectrum
  double c = 0.0;       // eigenfunction normalization
};

struct NoiseSpectrum {
  double c = 1.0;
  double alpha = 2.0;
  std::vector<double> gammas;
};

enum class SpectrumProfile { PowerLaw, Custom };

// Critical classification tolerance: |J - 2 pi n| <= 1e-12 * max(1, J).
Regime classify_regime(double J, int n);

std::vector<ModeSpec> build_eigenbasis(const DomainConfig& cfg);

// PowerLaw: gamma_n = sqrt(c/n^alpha) for n >= 1, gamma_0 = sqrt(c).
// Custom sequences must be nonincreasing in gamma^2 and obey the c/n^alpha cap.
NoiseSpectrum attach_spectrum(std::vector<ModeSpec>& modes, double c, double alpha,
                              SpectrumProfile profile,
                              std::span<const double> custom = {});

double eval_eigenfunction(const ModeSpec& mode, double x);

// Truncated spatial covariance f(x,y) = sum_n gamma_n^2 phi_n(x) phi_n(y).
double noise_covariance_kernel(const NoiseSpectrum& spec,
                               const std::vector<ModeSpec>& modes, double x,
                               double y);

// Mass beyond the truncation: sum_{n>N} gamma_n^2 <= c * N^{1-alpha} / (alpha-1).
double spectrum_tail_bound(double c, double alpha, int n_modes);

}  // namespace wavepolymer
