#include "wavepolymer/verify.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wavepolymer/rng.hpp"

namespace wavepolymer {

double variance_oracle(const ModeSpec& mode) {
  if (mode.n < 1) throw std::invalid_argument("variance_oracle: n >= 1 required");
  const double g = mode.gamma;
  boost::math::quadrature::exp_sinh<double> integrator;
  auto integrate = [&](auto kernel) {
    return integrator.integrate([&](double u) { const double v = kernel(u); return v * v; },
                                1e-10);
  };
  switch (mode.regime) {
    case Regime::Overdamped: {
      const double w = 2.0 * mode.omega;
      return integrate([&](double u) {
        return (g / w) * (std::exp(-0.5 * (1.0 - w) * u) -
                          std::exp(-0.5 * (1.0 + w) * u));
      });
    }
    case Regime::Critical:
      return integrate([&](double u) { return g * u * std::exp(-0.5 * u); });
    case Regime::Underdamped: {
      const double om = mode.omega;
      return integrate([&](double u) {
        return (g / om) * std::exp(-0.5 * u) * std::sin(om * u);
      });
    }
  }
  throw std::logic_error("variance_oracle: unknown regime");
}

double pair_variance(const std::vector<ModeSpec>& modes, double x1, double x2) {
  double s = 0.0;
  for (const auto& m : modes) {
    if (m.n == 0) continue;
    const double d = eval_eigenfunction(m, x1) - eval_eigenfunction(m, x2);
    s += stationary_variance(m).var_a * d * d;
  }
  return s;
}

namespace {

std::vector<ModeSpec> power_law_modes(double J, int n_modes, double c,
                                      double alpha) {
  DomainConfig cfg;
  cfg.J = J;
  cfg.T = 1.0;
  cfg.n_modes = n_modes;
  cfg.n_x = 4 * n_modes;
  cfg.n_t = 1;
  auto modes = build_eigenbasis(cfg);
  attach_spectrum(modes, c, alpha, SpectrumProfile::PowerLaw);
  return modes;
}

}  // namespace

LemmaReport check_variance_lower_bound(std::span<const double> J_grid,
                                       int n_pairs, int n_modes, double delta0,
                                       double c, double alpha,
                                       std::uint64_t seed, double h_floor) {
  if (!(delta0 > 0.0 && delta0 <= 0.5))
    throw std::invalid_argument("check_variance_lower_bound: delta0 in (0, 0.5]");
  if (!(h_floor > 0.0 && h_floor < delta0))
    throw std::invalid_argument("check_variance_lower_bound: h_floor in (0, delta0)");

  LemmaReport rep;
  rep.lemma_id = "variance_lower_bound";
  rep.tolerance = 0.0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::ostringstream details;
  bool stable = true;

  for (std::size_t jg = 0; jg < J_grid.size(); ++jg) {
    const double J = J_grid[jg];
    const auto modes = power_law_modes(J, n_modes, c, alpha);
    const auto modes2 = power_law_modes(J, 2 * n_modes, c, alpha);
    RngStream rng(seed, 1000 + jg);

    double min_ratio = std::numeric_limits<double>::infinity();
    double min_ratio2 = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n_pairs; ++p) {
      const double h = (h_floor + (delta0 - h_floor) * rng.uniform()) * J;
      const double x1 = (J - h) * rng.uniform();
      const double x2 = x1 + h;
      min_ratio = std::min(min_ratio, pair_variance(modes, x1, x2) * J * J / h);
      min_ratio2 =
          std::min(min_ratio2, pair_variance(modes2, x1, x2) * J * J / h);
      rep.n_cases++;
    }
    const double change = std::abs(min_ratio2 - min_ratio) /
                          std::max(min_ratio, min_ratio2);
    if (change >= 0.01) stable = false;
    rep.worst_margin = std::min(rep.worst_margin, min_ratio);
    details << "J=" << J << " min_ratio=" << min_ratio
            << " refined=" << min_ratio2 << " rel_change=" << change << "\n";
  }
  rep.pass = rep.worst_margin > 0.0 && stable;
  rep.details = details.str();
  return rep;
}

LemmaReport check_brownian_decomposition(std::span<const int> T_values,
                                         int n_paths, double a, double b,
                                         double dt, std::uint64_t seed) {
  const int per = static_cast<int>(std::lround(1.0 / dt));
  if (std::abs(per * dt - 1.0) > 1e-9)
    throw std::invalid_argument("check_brownian_decomposition: dt must divide 1");
  for (int T : T_values)
    if (T <= 2)
      throw std::invalid_argument("check_brownian_decomposition: T > 2 required");

  LemmaReport rep;
  rep.lemma_id = "brownian_decomposition";
  rep.tolerance = 1e-9;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::ostringstream details;

  for (std::size_t ti = 0; ti < T_values.size(); ++ti) {
    const int T = T_values[ti];
    const int n = T * per;
    RngStream rng(seed, 2000 + ti);
    double worst = std::numeric_limits<double>::infinity();

    for (int path = 0; path < n_paths; ++path) {
      // Brownian path on the uniform [0, 1] prefix, running sup of |B|.
      double B = 0.0, sup = 0.0;
      const double sqrt_pre = std::sqrt(dt);
      for (int j = 0; j < per; ++j) {
        B += sqrt_pre * rng.normal();
        sup = std::max(sup, std::abs(B));
      }

      // Continue on the times e^{b t_i}; accumulate both integrals block-wise.
      double lhs = 0.0, rhs = 0.0;
      double prev_s = 1.0;
      double tail_sum = 0.0;      // sum_{m<k} 2*18^{k-m} D_m^2 for current k
      double sup_e_b_sq = 0.0;    // Btilde_{e^b}^2, fixed after block 0
      double pow18 = 1.0;         // 18^k
      for (int k = 0; k < T; ++k) {
        const double anchor = B;
        double local = 0.0;  // sup over [e^{bk}, e^{bt}] of |B - B_anchor|
        double lhs_block = 0.0, rhs_block = 0.0;
        double prev_lhs_f = std::exp(-a * k) * sup * sup;
        double prev_rhs_f = (k == 0)
                                ? prev_lhs_f
                                : std::exp(-a * k) *
                                      (tail_sum + pow18 * sup_e_b_sq);
        for (int j = 1; j <= per; ++j) {
          const double t = k + j * dt;
          const double s = std::exp(b * t);
          B += std::sqrt(s - prev_s) * rng.normal();
          prev_s = s;
          sup = std::max(sup, std::abs(B));
          local = std::max(local, std::abs(B - anchor));
          const double et = std::exp(-a * t);
          const double lhs_f = et * sup * sup;
          const double rhs_f =
              (k == 0) ? lhs_f
                       : et * (tail_sum + pow18 * sup_e_b_sq +
                               2.0 * local * local);
          lhs_block += 0.5 * (prev_lhs_f + lhs_f) * dt;
          rhs_block += 0.5 * (prev_rhs_f + rhs_f) * dt;
          prev_lhs_f = lhs_f;
          prev_rhs_f = rhs_f;
        }
        lhs += lhs_block;
        rhs += rhs_block;
        if (k == 0) sup_e_b_sq = sup * sup;
        tail_sum = 18.0 * (tail_sum + 2.0 * local * local);
        pow18 *= 18.0;
      }
      worst = std::min(worst, (rhs - lhs) / std::max(1.0, rhs));
      rep.n_cases++;
    }
    details << "T=" << T << " min_rel_margin=" << worst << "\n";
    rep.worst_margin = std::min(rep.worst_margin, worst);
  }
  rep.pass = rep.worst_margin >= -rep.tolerance;
  rep.details = details.str();
  return rep;
}

double tail_integral(double sigma, double gamma) {
  if (!(1.0 - 2.0 * gamma * sigma * sigma > 0.0))
    throw std::invalid_argument("tail_integral: need 1 - 2 gamma sigma^2 > 0");
  boost::math::quadrature::exp_sinh<double> integrator;
  // y = log x turns int_1^inf P(X >= sqrt(log x / gamma)) dx into
  // int_0^inf e^y P(X >= sqrt(y/gamma)) dy with an exponentially decaying
  // integrand (decay rate 1/(2 gamma sigma^2) - 1 > 0).
  return integrator.integrate(
      [&](double y) {
        const double z = std::sqrt(y / gamma) / (sigma * std::sqrt(2.0));
        // Far tail: e^y overflows while erfc underflows; combine the
        // exponents via erfc(z) ~ e^{-z^2}/(z sqrt(pi)).
        if (z >= 25.0)
          return 0.5 * std::exp(y - z * z) /
                 (z * std::sqrt(std::acos(-1.0)));
        return 0.5 * std::exp(y) * boost::math::erfc(z);
      },
      1e-10);
}

double tail_integral_bound(double sigma, double gamma) {
  const double q = 2.0 * gamma * sigma * sigma;
  if (!(q < 1.0))
    throw std::invalid_argument("tail_integral_bound: need 1 - 2 gamma sigma^2 > 0");
  return sigma * sigma * gamma / std::sqrt(1.0 - q);
}

LemmaReport check_tail_integral_bound(std::span<const double> sigma_grid,
                                      std::span<const double> gamma_grid) {
  LemmaReport rep;
  rep.lemma_id = "tail_integral_bound";
  rep.tolerance = 1e-9;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::ostringstream details;
  for (double sigma : sigma_grid)
    for (double gamma : gamma_grid) {
      if (!(2.0 * gamma * sigma * sigma < 1.0))
        throw std::invalid_argument(
            "check_tail_integral_bound: grid point violates 1 - 2 gamma sigma^2 > 0");
      const double I = tail_integral(sigma, gamma);
      const double bound = tail_integral_bound(sigma, gamma);
      const double margin = bound - I;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      rep.n_cases++;
      details << "sigma=" << sigma << " gamma=" << gamma << " I=" << I
              << " bound=" << bound << "\n";
    }
  rep.pass = rep.worst_margin >= -rep.tolerance;
  rep.details = details.str();
  return rep;
}

LemmaReport check_exp_quadratic(double t_max, double step) {
  if (!(t_max > 0.0 && step > 0.0))
    throw std::invalid_argument("check_exp_quadratic: t_max, step > 0 required");
  LemmaReport rep;
  rep.lemma_id = "exp_quadratic";
  rep.tolerance = 0.0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  const long n = static_cast<long>(std::floor(t_max / step));
  for (long i = 0; i <= n; ++i) {
    const double t = i * step;
    const double margin = std::exp(0.9 * t) - t * t - 1.0;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      worst_t = t;
    }
    rep.n_cases++;
  }
  rep.pass = rep.worst_margin >= 0.0;
  std::ostringstream details;
  details << "min margin " << rep.worst_margin << " at t=" << worst_t << "\n";
  rep.details = details.str();
  return rep;
}

LemmaReport check_jensen_chain(std::span<const FieldGrid> fields, double K,
                               const BinRule& rule) {
  LemmaReport rep;
  rep.lemma_id = "jensen_chain";
  rep.tolerance = 1e-12;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::ostringstream details;
  int violations = 0;

  for (const auto& field : fields) {
    const double T = field.cfg.T;
    const double J = field.cfg.J;
    const auto stat = radius(field);
    const double Ks = K > 0.0 ? K : stat.R;
    if (K > 0.0 && stat.R > K) continue;  // chain only claimed on {R <= K}
    rep.n_cases++;

    const auto w = time_weights(field.cfg.n_t);
    const double thresh = 2.0 * Ks * Ks;

    // |{t : theta^2 <= 2K^2}| >= T/2 (Markov with the same weights).
    double good_t = 0.0;
    for (std::size_t i = 0; i < stat.theta_sq.size(); ++i)
      if (stat.theta_sq[i] <= thresh + 1e-15) good_t += w[i] * T;
    double margin = good_t - 0.5 * T;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rep.tolerance) ++violations;

    // On those slices, |{x : |u - ubar| <= 2K}| >= J/2 (Chebyshev in x).
    const auto ubar = spatial_mean(field);
    const double dx = field.dx();
    for (std::size_t i = 0; i < stat.theta_sq.size(); ++i) {
      if (stat.theta_sq[i] > thresh + 1e-15) continue;
      int inside = 0;
      for (int j = 0; j < field.cfg.n_x; ++j)
        if (std::abs(field.values(static_cast<int>(i), j) - ubar[i]) <=
            2.0 * Ks + 1e-15)
          ++inside;
      margin = inside * dx - 0.5 * J;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -rep.tolerance) ++violations;
    }

    // Phi >= T J^2/(32 K) (1 - eps_disc): the histogram spreads the >= J/2
    // occupation mass over at most 4K/bin_width + 2 bins.
    if (Ks > 0.0) {
      const auto si = self_intersection(field, rule);
      const double lo = field.values.minCoeff();
      const double hi = field.values.maxCoeff();
      const double eps = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
      const double bin_width = (hi - lo + eps) / rule.n_bins;
      const double eps_disc = bin_width / (2.0 * Ks);
      const double lower = T * J * J / (32.0 * Ks) * (1.0 - eps_disc);
      margin = si.phi - lower;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -rep.tolerance) ++violations;
    }
  }
  rep.pass = violations == 0;
  details << "samples=" << rep.n_cases << " violations=" << violations << "\n";
  rep.details = details.str();
  return rep;
}

}  // namespace wavepolymer
