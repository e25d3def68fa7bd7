#pragma once

#include <span>
#include <vector>

#include "wavepolymer/field_radius.hpp"

namespace wavepolymer {

// Histogram estimate of the occupation measure of one time slice.
// masses[k] is dx * #{j : u(t, x_j) in bin k}; the local-time density inside
// bin k is masses[k] / bin_width.
struct LocalTimeEstimate {
  double bin_width = 0.0;
  double bin_origin = 0.0;
  std::vector<double> masses;
  int t_index = 0;
};

struct SelfIntersection {
  double phi = 0.0;                // int_0^T int l_t(y)^2 dy dt
  std::vector<double> per_slice;   // int l_t(y)^2 dy per time slice
  int degenerate_slices = 0;       // near-constant slices (infinite continuum l^2)
};

// Shared value-axis bins for all slices of a field; keeps Phi consistent
// across slices. Degenerate (constant) fields get a single full-mass bin.
struct BinRule {
  int n_bins = 256;
};

LocalTimeEstimate occupation_histogram(std::span<const double> slice, double dx,
                                       double bin_width, double bin_origin,
                                       int n_bins, int t_index = 0);

// Standalone form: bins anchored at the slice minimum.
LocalTimeEstimate occupation_histogram(std::span<const double> slice, double dx,
                                       double bin_width);

SelfIntersection self_intersection(const FieldGrid& field, const BinRule& rule);

// Flat-profile heuristic: l ~ J/(2R) on [-R, R] gives T J^2 / (2R).
double heuristic_flat_phi(double J, double T, double R);

}  // namespace wavepolymer
