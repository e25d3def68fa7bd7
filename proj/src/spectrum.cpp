#include "wavepolymer/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavepolymer {

namespace {
constexpr double kPi = std::numbers::pi;
}

void DomainConfig::validate() const {
  if (!(J > 0.0)) throw std::invalid_argument("DomainConfig: J must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("DomainConfig: T must be positive");
  if (n_modes < 1) throw std::invalid_argument("DomainConfig: n_modes must be >= 1");
  if (n_x < 8) throw std::invalid_argument("DomainConfig: n_x must be >= 8");
  if (n_t < 1) throw std::invalid_argument("DomainConfig: n_t must be >= 1");
  if (n_x < 4 * n_modes)
    throw std::invalid_argument(
        "DomainConfig: AliasRule violated, n_x must be >= 4*n_modes (n_x=" +
        std::to_string(n_x) + ", n_modes=" + std::to_string(n_modes) + ")");
}

Regime classify_regime(double J, int n) {
  const double boundary = 2.0 * kPi * n;
  const double tol = 1e-12 * std::max(1.0, J);
  if (std::abs(J - boundary) <= tol) return Regime::Critical;
  return J > boundary ? Regime::Overdamped : Regime::Underdamped;
}

std::vector<ModeSpec> build_eigenbasis(const DomainConfig& cfg) {
  cfg.validate();
  std::vector<ModeSpec> modes;
  modes.reserve(cfg.n_modes);
  for (int n = 0; n < cfg.n_modes; ++n) {
    ModeSpec m;
    m.n = n;
    m.J = cfg.J;
    m.k = n * kPi / cfg.J;
    m.lambda = -m.k * m.k;
    m.omega = 0.5 * std::sqrt(std::abs(4.0 * m.k * m.k - 1.0));
    m.regime = classify_regime(cfg.J, n);
    m.c = (n == 0) ? std::sqrt(1.0 / cfg.J) : std::sqrt(2.0 / cfg.J);
    modes.push_back(m);
  }
  return modes;
}

NoiseSpectrum attach_spectrum(std::vector<ModeSpec>& modes, double c, double alpha,
                              SpectrumProfile profile,
                              std::span<const double> custom) {
  if (!(c > 0.0)) throw std::invalid_argument("attach_spectrum: c must be positive");
  if (!(alpha > 0.0))
    throw std::invalid_argument("attach_spectrum: SpectrumDivergent, alpha must be positive");

  NoiseSpectrum spec;
  spec.c = c;
  spec.alpha = alpha;
  spec.gammas.resize(modes.size());

  if (profile == SpectrumProfile::PowerLaw) {
    if (!(alpha > 1.0))
      throw std::invalid_argument(
          "attach_spectrum: SpectrumDivergent, PowerLaw requires alpha > 1");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const int n = modes[i].n;
      spec.gammas[i] = (n == 0) ? std::sqrt(c) : std::sqrt(c / std::pow(n, alpha));
    }
  } else {
    if (custom.size() != modes.size())
      throw std::invalid_argument("attach_spectrum: Custom sequence length mismatch");
    for (std::size_t i = 0; i < custom.size(); ++i) {
      const double g = custom[i];
      if (g < 0.0) throw std::invalid_argument("attach_spectrum: negative gamma");
      if (i > 0 && g * g > custom[i - 1] * custom[i - 1] + 1e-15)
        throw std::invalid_argument("attach_spectrum: NonMonotone gamma^2 sequence");
      const int n = modes[i].n;
      if (n >= 1 && g * g > c / std::pow(n, alpha) + 1e-15)
        throw std::invalid_argument(
            "attach_spectrum: gamma_n^2 exceeds c/n^alpha cap at n=" + std::to_string(n));
      spec.gammas[i] = g;
    }
  }

  for (std::size_t i = 0; i < modes.size(); ++i) modes[i].gamma = spec.gammas[i];
  return spec;
}

double eval_eigenfunction(const ModeSpec& mode, double x) {
  if (x < -1e-12 || x > mode.J + 1e-12)
    throw std::invalid_argument("eval_eigenfunction: x outside [0, J]");
  return mode.c * std::cos(mode.n * kPi * x / mode.J);
}

double noise_covariance_kernel(const NoiseSpectrum& spec,
                               const std::vector<ModeSpec>& modes, double x,
                               double y) {
  double f = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double g2 = spec.gammas[i] * spec.gammas[i];
    f += g2 * eval_eigenfunction(modes[i], x) * eval_eigenfunction(modes[i], y);
  }
  return f;
}

double spectrum_tail_bound(double c, double alpha, int n_modes) {
  if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
  return c * std::pow(static_cast<double>(n_modes), 1.0 - alpha) / (alpha - 1.0);
}

}  // namespace wavepolymer
