#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wavepolymer/mode_dynamics.hpp"
#include "wavepolymer/spectrum.hpp"

namespace wavepolymer {

// u(t_i, x_j) on the uniform midpoint grid, rows indexed by time.
struct FieldGrid {
  DomainConfig cfg;
  Eigen::MatrixXd values;  // (n_t+1) x n_x

  double dx() const { return cfg.J / cfg.n_x; }
  double x_at(int j) const { return (j + 0.5) * dx(); }
};

struct RadiusStat {
  double R = 0.0;
  std::vector<double> theta_sq;      // theta_u(t_i, J)^2 per time slice
  std::vector<double> mode_contrib;  // S_T^n / (TJ) per mode, when paths known
};

// Truncated Fourier synthesis u = sum a_n(t) phi_n(x). Paths must cover the
// mode indices of `modes` in order and share the config's time grid.
FieldGrid assemble_field(const std::vector<ModePath>& paths,
                         const std::vector<ModeSpec>& modes,
                         const DomainConfig& cfg);

// ubar(t_i) by midpoint quadrature (equals the row mean on a uniform grid).
std::vector<double> spatial_mean(const FieldGrid& field);

std::vector<double> theta_profile(const FieldGrid& field);

RadiusStat radius(const FieldGrid& field);

// Same, plus the independent mode-sum decomposition S_T^n/(TJ) computed from
// the paths (trapezoid in time), not from the grid.
RadiusStat radius_with_modes(const FieldGrid& field,
                             const std::vector<ModePath>& paths);

// Trapezoid weights over the time grid, normalized to sum to 1.
std::vector<double> time_weights(int n_t);

// Row-major float64 dump with a 32-byte header (magic, version, n_t, n_x, J, T).
void dump_field(const FieldGrid& field, const std::string& path);
FieldGrid load_field(const std::string& path);

}  // namespace wavepolymer
