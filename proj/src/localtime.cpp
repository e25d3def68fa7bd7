#include "wavepolymer/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavepolymer {

LocalTimeEstimate occupation_histogram(std::span<const double> slice, double dx,
                                       double bin_width, double bin_origin,
                                       int n_bins, int t_index) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("occupation_histogram: bin_width must be positive");
  LocalTimeEstimate est;
  est.bin_width = bin_width;
  est.bin_origin = bin_origin;
  est.t_index = t_index;
  est.masses.assign(n_bins, 0.0);
  for (double v : slice) {
    int k = static_cast<int>(std::floor((v - bin_origin) / bin_width));
    k = std::clamp(k, 0, n_bins - 1);
    est.masses[k] += dx;
  }
  return est;
}

LocalTimeEstimate occupation_histogram(std::span<const double> slice, double dx,
                                       double bin_width) {
  if (slice.empty())
    throw std::invalid_argument("occupation_histogram: empty slice");
  const auto [lo, hi] = std::minmax_element(slice.begin(), slice.end());
  const int n_bins =
      std::max(1, static_cast<int>(std::ceil((*hi - *lo) / bin_width + 1e-12)));
  return occupation_histogram(slice, dx, bin_width, *lo, n_bins, 0);
}

SelfIntersection self_intersection(const FieldGrid& field, const BinRule& rule) {
  const int n_t = field.cfg.n_t;
  const double lo = field.values.minCoeff();
  const double hi = field.values.maxCoeff();
  const double eps = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  const double bin_width = (hi - lo + eps) / rule.n_bins;

  SelfIntersection out;
  out.per_slice.resize(n_t + 1);
  std::vector<double> slice(field.cfg.n_x);
  for (int i = 0; i <= n_t; ++i) {
    for (int j = 0; j < field.cfg.n_x; ++j) slice[j] = field.values(i, j);
    const auto est = occupation_histogram(slice, field.dx(), bin_width, lo,
                                          rule.n_bins, i);
    double s = 0.0;
    for (double m : est.masses) s += m * m;
    out.per_slice[i] = s / bin_width;

    const auto [slo, shi] = std::minmax_element(slice.begin(), slice.end());
    if (*shi - *slo <= eps) ++out.degenerate_slices;
  }

  const auto w = time_weights(n_t);
  double phi = 0.0;
  for (int i = 0; i <= n_t; ++i) phi += w[i] * out.per_slice[i];
  out.phi = phi * field.cfg.T;
  return out;
}

double heuristic_flat_phi(double J, double T, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("heuristic_flat_phi: R must be positive");
  return T * J * J / (2.0 * R);
}

}  // namespace wavepolymer
