#include "wavepolymer/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavepolymer {

double noise_inner_product_phi1(const std::vector<ModeSpec>& modes,
                                int n_quad) {
  if (modes.empty()) throw std::invalid_argument("noise_inner_product_phi1: no modes");
  const double J = modes.front().J;
  const ModeSpec* mode1 = nullptr;
  for (const auto& m : modes)
    if (m.n == 1) mode1 = &m;
  if (!mode1) throw std::invalid_argument("noise_inner_product_phi1: mode 1 missing");

  // f(x,y) = sum gamma_n^2 phi_n(x) phi_n(y), so the double integral
  // factorizes into sum gamma_n^2 (int phi_1 phi_n)^2. Midpoint quadrature
  // (exact for the cosine products at this resolution).
  const double dx = J / n_quad;
  double total = 0.0;
  for (const auto& m : modes) {
    double inner = 0.0;
    for (int j = 0; j < n_quad; ++j) {
      const double x = (j + 0.5) * dx;
      inner += eval_eigenfunction(*mode1, x) * eval_eigenfunction(m, x);
    }
    inner *= dx;
    total += m.gamma * m.gamma * inner * inner;
  }
  return total;
}

double sigma_x_sq(double T, const std::vector<ModeSpec>& modes, int n_quad) {
  return T * noise_inner_product_phi1(modes, n_quad);
}

double log_density(std::span<const double> dW, double a, double T,
                   const ModeSpec& mode1) {
  if (mode1.n != 1) throw std::invalid_argument("log_density: expects mode 1");
  if (dW.empty()) throw std::invalid_argument("log_density: empty noise record");
  const double w_T = std::accumulate(dW.begin(), dW.end(), 0.0);
  const double g = mode1.gamma;
  return a * g * w_T - 0.5 * a * a * g * g * T;
}

double log_zeta(double a, double T, const std::vector<ModeSpec>& modes) {
  return 0.5 * a * a * sigma_x_sq(T, modes);
}

double tilt_forcing_coefficient(double a, const ModeSpec& mode1) {
  if (mode1.n != 1) throw std::invalid_argument("tilt_forcing_coefficient: expects mode 1");
  return a * mode1.gamma * mode1.gamma;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  MeanSe r;
  for (double x : v) r.mean += x;
  r.mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - r.mean) * (x - r.mean);
  var /= (n - 1.0);
  r.se = std::sqrt(var / n);
  return r;
}

double time_average_mode1(const ModePath& path, int n_t) {
  const auto w = time_weights(n_t);
  double s = 0.0;
  for (int i = 0; i <= n_t; ++i) s += w[i] * path.states[i].a;
  return s;
}

}  // namespace

TiltReport tilt_consistency(TiltFunctional functional, double a, int n_replicas,
                            const std::vector<ModeSpec>& modes,
                            const DomainConfig& cfg, RngStream& rng) {
  if (n_replicas < 2) throw std::invalid_argument("tilt_consistency: need >= 2 replicas");
  cfg.validate();
  std::size_t i1 = modes.size();
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].n == 1) i1 = i;
  if (i1 == modes.size())
    throw std::invalid_argument("tilt_consistency: mode 1 missing");

  std::vector<TransitionKernel> kernels;
  kernels.reserve(modes.size());
  for (const auto& m : modes) kernels.push_back(build_transition(m, cfg.dt()));
  const double tilt = tilt_forcing_coefficient(a, modes[i1]);

  auto evaluate = [&](const std::vector<ModePath>& paths) {
    if (functional == TiltFunctional::ModeOneTimeAverage)
      return time_average_mode1(paths[i1], cfg.n_t);
    return radius(assemble_field(paths, modes, cfg)).R;
  };

  std::vector<double> tilted_vals(n_replicas);
  std::vector<double> reweighted_vals(n_replicas);
  std::vector<double> densities(n_replicas);
  for (int r = 0; r < n_replicas; ++r) {
    // Tilted simulation: mode 1 evolves under the shifted law. The initial
    // condition stays untilted -- exp(log_density) reweights only the driving
    // noise on [0, T], so this is the law the reweighted estimator targets.
    std::vector<ModePath> tilted;
    tilted.reserve(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const ModeState init = sample_stationary(modes[i], rng);
      tilted.push_back(evolve_path(modes[i], init, kernels[i], cfg.n_t, rng,
                                   i == i1 ? tilt : 0.0));
    }
    tilted_vals[r] = evaluate(tilted);

    // Untilted simulation with recorded mode-1 noise, then reweight.
    std::vector<ModePath> plain;
    plain.reserve(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const ModeState init = sample_stationary(modes[i], rng);
      plain.push_back(evolve_path(modes[i], init, kernels[i], cfg.n_t, rng,
                                  0.0, i == i1));
    }
    const double dens =
        std::exp(log_density(plain[i1].dW, a, cfg.T, modes[i1]));
    densities[r] = dens;
    reweighted_vals[r] = evaluate(plain) * dens;
  }

  TiltReport rep;
  rep.a = a;
  const auto t = mean_se(tilted_vals);
  const auto w = mean_se(reweighted_vals);
  const auto m = mean_se(densities);
  rep.tilted_mean = t.mean;
  rep.tilted_se = t.se;
  rep.reweighted_mean = w.mean;
  rep.reweighted_se = w.se;
  rep.martingale_mean = m.mean;
  rep.martingale_se = m.se;
  const double combined = std::hypot(t.se, w.se);
  rep.consistency_pass = std::abs(t.mean - w.mean) <= 4.0 * combined;
  return rep;
}

ZTBoundReport zt_lower_bound_report(double beta, double a,
                                    const DomainConfig& cfg,
                                    const std::vector<ModeSpec>& modes,
                                    int n_replicas, const BinRule& rule,
                                    RngStream& rng) {
  if (beta < 0.0) throw std::invalid_argument("zt_lower_bound_report: beta >= 0 required");
  cfg.validate();
  std::size_t i1 = modes.size();
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].n == 1) i1 = i;
  if (i1 == modes.size())
    throw std::invalid_argument("zt_lower_bound_report: mode 1 missing");

  PriorSampler prior(modes, cfg);

  // LHS: (1/T) log z_hat from importance weights over prior replicas.
  std::vector<GibbsSample> samples;
  samples.reserve(n_replicas);
  for (int r = 0; r < n_replicas; ++r) {
    GibbsSample s = weigh(prior.draw_field(rng), beta, rule);
    s.replica_id = r;
    samples.push_back(s);
  }
  const auto est = estimate_q(samples, QFunctional::Radius);

  // RHS: tilted replicas; per-slice time average Phi/T estimates E^[int l_0^2].
  std::vector<TransitionKernel> kernels;
  for (const auto& m : modes) kernels.push_back(build_transition(m, cfg.dt()));
  const double tilt = tilt_forcing_coefficient(a, modes[i1]);
  std::vector<double> phi_rates(n_replicas);
  for (int r = 0; r < n_replicas; ++r) {
    std::vector<ModePath> paths;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const bool is1 = (i == i1);
      const ModeState init =
          is1 ? sample_stationary_tilted(modes[i], tilt, rng)
              : sample_stationary(modes[i], rng);
      paths.push_back(evolve_path(modes[i], init, kernels[i], cfg.n_t, rng,
                                  is1 ? tilt : 0.0));
    }
    const auto field = assemble_field(paths, modes, cfg);
    phi_rates[r] = self_intersection(field, rule).phi / cfg.T;
  }
  const auto pr = mean_se(phi_rates);

  ZTBoundReport rep;
  rep.beta = beta;
  rep.a = a;
  rep.lhs = std::log(est.z_hat) / cfg.T;
  rep.rhs = -beta * pr.mean - log_zeta(a, cfg.T, modes) / cfg.T;
  rep.rhs_se = beta * pr.se;
  rep.margin = rep.lhs - rep.rhs;
  rep.ess = est.ess;
  return rep;
}

}  // namespace wavepolymer
