#include "wavepolymer/experiments.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace wavepolymer {

namespace {

std::vector<ModeSpec> nonzero_modes(const DomainConfig& cfg) {
  auto modes = build_eigenbasis(cfg);
  attach_spectrum(modes, 1.0, 2.0, SpectrumProfile::PowerLaw);
  std::vector<ModeSpec> out;
  for (const auto& m : modes)
    if (m.n >= 1) out.push_back(m);
  return out;
}

double envelope_fraction(std::span<const GibbsSample> samples, double lo,
                         double hi) {
  double max_lw = -1e300;
  for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    const double w = std::exp(s.log_weight - max_lw);
    den += w;
    if (s.radius.R >= lo && s.radius.R <= hi) num += w;
  }
  return num / den;
}

}  // namespace

std::vector<SweepPoint> run_sweep(std::span<const double> J_values,
                                  const SweepConfig& sc, std::uint64_t seed) {
  if (J_values.size() < 4)
    throw std::invalid_argument("run_sweep: need >= 4 J values");
  if (!std::is_sorted(J_values.begin(), J_values.end()))
    throw std::invalid_argument("run_sweep: J values must be sorted");

  std::vector<SweepPoint> points;
  points.reserve(J_values.size());
  for (std::size_t p = 0; p < J_values.size(); ++p) {
    DomainConfig cfg = sc.cfg_template;
    cfg.J = J_values[p];
    cfg.validate();
    const auto modes = nonzero_modes(cfg);
    const PriorSampler prior(modes, cfg);
    const std::uint64_t base = (p + 1) * 1000000ull;

    std::vector<GibbsSample> samples(sc.n_replicas);
    const int n_threads = std::max(1, sc.n_threads);
    auto worker = [&](int tid) {
      for (int r = tid; r < sc.n_replicas; r += n_threads) {
        RngStream rng(seed, base + static_cast<std::uint64_t>(r));
        GibbsSample s = weigh(prior.draw_field(rng), sc.beta, sc.bins);
        s.replica_id = r;
        s.rng_stream_id = rng.stream_id();
        samples[r] = s;
      }
    };
    if (n_threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
      for (auto& t : pool) t.join();
    }

    const auto est = estimate_q(samples, QFunctional::Radius);
    SweepPoint pt;
    pt.J = cfg.J;
    pt.beta = sc.beta;
    pt.T = cfg.T;
    const double env_lo = sc.envelope_eps * std::pow(cfg.J, 5.0 / 3.0);
    const double env_hi = sc.envelope_K * std::pow(cfg.J, 5.0 / 3.0);

    if (est.ess >= sc.ess_floor) {
      pt.sampler = "is";
      pt.q_radius_mean = est.q_mean;
      pt.q_radius_se = est.q_se;
      pt.ess = est.ess;
      pt.envelope_prob = envelope_fraction(samples, env_lo, env_hi);
    } else {
      pt.sampler = "pcn";
      RngStream rng(seed, base + 999999ull);
      const auto chain = pcn_chain(prior, sc.beta, sc.pcn_rho, sc.pcn_steps,
                                   rng, sc.bins);
      const int burn = sc.pcn_steps / 4;
      std::vector<double> radii;
      radii.reserve(chain.size() - burn);
      int in_env = 0;
      for (std::size_t i = burn; i < chain.size(); ++i) {
        const double R = chain[i].radius.R;
        radii.push_back(R);
        if (R >= env_lo && R <= env_hi) ++in_env;
      }
      double mean = 0.0;
      for (double r : radii) mean += r;
      mean /= static_cast<double>(radii.size());
      double var = 0.0;
      for (double r : radii) var += (r - mean) * (r - mean);
      var /= static_cast<double>(radii.size() - 1);
      pt.q_radius_mean = mean;
      pt.q_radius_se = batch_mean_se(radii);
      pt.ess = pt.q_radius_se > 0.0 ? var / (pt.q_radius_se * pt.q_radius_se)
                                    : static_cast<double>(radii.size());
      pt.envelope_prob = static_cast<double>(in_env) / radii.size();
    }
    points.push_back(pt);
  }
  return points;
}

ScalingFit fit_exponent_xy(std::span<const double> log_j,
                           std::span<const double> log_r) {
  const std::size_t n = log_j.size();
  if (n < 4 || log_r.size() != n)
    throw std::invalid_argument("fit_exponent: need >= 4 matched points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += log_j[i];
    my += log_r[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (log_j[i] - mx) * (log_j[i] - mx);
    sxy += (log_j[i] - mx) * (log_r[i] - my);
    syy += (log_r[i] - my) * (log_r[i] - my);
  }
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = log_r[i] - fit.intercept - fit.slope * log_j[i];
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  const double se =
      std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double t = boost::math::quantile(dist, 0.975);
  fit.ci_low = fit.slope - t * se;
  fit.ci_high = fit.slope + t * se;
  return fit;
}

ScalingFit fit_exponent(std::span<const SweepPoint> points) {
  std::vector<double> lj, lr;
  for (const auto& p : points) {
    if (!(p.q_radius_mean > 0.0))
      throw std::invalid_argument("fit_exponent: nonpositive mean");
    lj.push_back(std::log(p.J));
    lr.push_back(std::log(p.q_radius_mean));
  }
  return fit_exponent_xy(lj, lr);
}

boost::rational<long long> heuristic_exponent(
    boost::rational<long long> lhs_J_power,
    boost::rational<long long> lhs_R_power,
    boost::rational<long long> rhs_J_power,
    boost::rational<long long> rhs_R_power) {
  if (lhs_R_power == rhs_R_power)
    throw std::invalid_argument("heuristic_exponent: NoSolution (identical R powers)");
  return (lhs_J_power - rhs_J_power) / (rhs_R_power - lhs_R_power);
}

double neumann_minimizer_check(double R, double J) {
  if (!(R > 0.0 && J > 0.0))
    throw std::invalid_argument("neumann_minimizer_check: R, J > 0 required");
  const double a = -4.0 * R / (J * J);
  auto u = [&](double x) {
    if (x <= 0.5 * J) return a * x * x - 0.25 * a * J * J;
    const double y = J - x;
    return -(a * y * y - 0.25 * a * J * J);
  };
  if (std::abs(u(0.0) - R) > 1e-12 * R || std::abs(u(J) + R) > 1e-12 * R)
    throw std::logic_error("neumann_minimizer_check: boundary values off");
  // Second derivative from the piecewise definition, energy by midpoint rule.
  const int n = 1 << 14;
  const double dx = J / n;
  double energy = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = (j + 0.5) * dx;
    const double upp = (x <= 0.5 * J) ? 2.0 * a : -2.0 * a;
    energy += upp * upp * dx;
  }
  return 0.5 * energy;
}

}  // namespace wavepolymer
