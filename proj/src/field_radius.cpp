#include "wavepolymer/field_radius.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace wavepolymer {

std::vector<double> time_weights(int n_t) {
  std::vector<double> w(n_t + 1, 1.0);
  if (n_t >= 1) {
    w.front() = 0.5;
    w.back() = 0.5;
    for (double& v : w) v /= n_t;
  }
  return w;
}

FieldGrid assemble_field(const std::vector<ModePath>& paths,
                         const std::vector<ModeSpec>& modes,
                         const DomainConfig& cfg) {
  if (paths.size() != modes.size())
    throw std::invalid_argument("assemble_field: paths/modes size mismatch");
  for (const auto& p : paths)
    if (static_cast<int>(p.states.size()) != cfg.n_t + 1)
      throw std::invalid_argument("assemble_field: path length does not match time grid");

  FieldGrid field;
  field.cfg = cfg;
  field.values.setZero(cfg.n_t + 1, cfg.n_x);

  // Precompute phi_n(x_j) on the midpoint grid.
  Eigen::MatrixXd phi(modes.size(), cfg.n_x);
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (int j = 0; j < cfg.n_x; ++j)
      phi(m, j) = eval_eigenfunction(modes[m], field.x_at(j));

  Eigen::MatrixXd coeff(cfg.n_t + 1, modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (int i = 0; i <= cfg.n_t; ++i) coeff(i, m) = paths[m].states[i].a;

  field.values = coeff * phi;
  return field;
}

std::vector<double> spatial_mean(const FieldGrid& field) {
  std::vector<double> ubar(field.values.rows());
  for (int i = 0; i < field.values.rows(); ++i)
    ubar[i] = field.values.row(i).mean();
  return ubar;
}

std::vector<double> theta_profile(const FieldGrid& field) {
  std::vector<double> theta_sq(field.values.rows());
  for (int i = 0; i < field.values.rows(); ++i) {
    const auto row = field.values.row(i);
    const double mean = row.mean();
    theta_sq[i] = (row.array() - mean).square().mean();
  }
  return theta_sq;
}

RadiusStat radius(const FieldGrid& field) {
  RadiusStat stat;
  stat.theta_sq = theta_profile(field);
  const auto w = time_weights(field.cfg.n_t);
  double r2 = 0.0;
  for (std::size_t i = 0; i < stat.theta_sq.size(); ++i) r2 += w[i] * stat.theta_sq[i];
  stat.R = std::sqrt(std::max(r2, 0.0));
  return stat;
}

RadiusStat radius_with_modes(const FieldGrid& field,
                             const std::vector<ModePath>& paths) {
  RadiusStat stat = radius(field);
  const auto w = time_weights(field.cfg.n_t);
  stat.mode_contrib.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.mode_index == 0) continue;  // zero mode never enters R
    double s = 0.0;
    for (std::size_t i = 0; i < p.states.size(); ++i)
      s += w[i] * p.states[i].a * p.states[i].a;
    // w is normalized by T, so s = S_T^n / T and s/J = S_T^n/(TJ).
    stat.mode_contrib.push_back(s / field.cfg.J);
  }
  return stat;
}

namespace {
constexpr std::uint32_t kMagic = 0x57504647;  // "WPFG"
constexpr std::uint32_t kVersion = 1;
}  // namespace

void dump_field(const FieldGrid& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_field: cannot open " + path);
  const std::uint32_t n_t = field.cfg.n_t, n_x = field.cfg.n_x;
  out.write(reinterpret_cast<const char*>(&kMagic), 4);
  out.write(reinterpret_cast<const char*>(&kVersion), 4);
  out.write(reinterpret_cast<const char*>(&n_t), 4);
  out.write(reinterpret_cast<const char*>(&n_x), 4);
  out.write(reinterpret_cast<const char*>(&field.cfg.J), 8);
  out.write(reinterpret_cast<const char*>(&field.cfg.T), 8);
  for (int i = 0; i < field.values.rows(); ++i)
    for (int j = 0; j < field.values.cols(); ++j) {
      const double v = field.values(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

FieldGrid load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  std::uint32_t magic = 0, version = 0, n_t = 0, n_x = 0;
  double J = 0.0, T = 0.0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&n_t), 4);
  in.read(reinterpret_cast<char*>(&n_x), 4);
  in.read(reinterpret_cast<char*>(&J), 8);
  in.read(reinterpret_cast<char*>(&T), 8);
  if (magic != kMagic || version != kVersion)
    throw std::runtime_error("load_field: bad header in " + path);
  FieldGrid field;
  field.cfg.J = J;
  field.cfg.T = T;
  field.cfg.n_t = static_cast<int>(n_t);
  field.cfg.n_x = static_cast<int>(n_x);
  field.values.resize(n_t + 1, n_x);
  for (std::uint32_t i = 0; i <= n_t; ++i)
    for (std::uint32_t j = 0; j < n_x; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), 8);
      field.values(i, j) = v;
    }
  if (!in) throw std::runtime_error("load_field: truncated file " + path);
  return field;
}

}  // namespace wavepolymer
