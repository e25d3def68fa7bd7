#include "wavepolymer/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wavepolymer {

GibbsSample weigh(const FieldGrid& field, double beta, const BinRule& rule) {
  if (beta < 0.0) throw std::invalid_argument("weigh: beta must be >= 0");
  GibbsSample s;
  s.phi = self_intersection(field, rule).phi;
  s.log_weight = -beta * s.phi;
  s.radius = radius(field);
  return s;
}

namespace {

double eval_functional(const GibbsSample& s, QFunctional f, double threshold) {
  switch (f) {
    case QFunctional::Radius:
      return s.radius.R;
    case QFunctional::RadiusSq:
      return s.radius.R * s.radius.R;
    case QFunctional::IndicatorRadiusBelow:
      return s.radius.R <= threshold ? 1.0 : 0.0;
    case QFunctional::IndicatorRadiusAbove:
      return s.radius.R >= threshold ? 1.0 : 0.0;
  }
  throw std::invalid_argument("estimate_q: unknown functional");
}

}  // namespace

GibbsEstimate estimate_q(std::span<const GibbsSample> samples, QFunctional f,
                         double threshold) {
  if (samples.size() < 2)
    throw std::invalid_argument("estimate_q: need at least 2 samples");

  double max_lw = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
  if (!std::isfinite(max_lw))
    throw std::runtime_error("estimate_q: DegenerateWeights (all weights zero)");

  // Shifted weights: at least one equals 1, so the sums below are safe.
  const std::size_t n = samples.size();
  double sum_w = 0.0, sum_w2 = 0.0, sum_wf = 0.0, z = 0.0;
  for (const auto& s : samples) {
    const double w = std::exp(s.log_weight - max_lw);
    sum_w += w;
    sum_w2 += w * w;
    sum_wf += w * eval_functional(s, f, threshold);
    z += std::exp(s.log_weight);
  }

  GibbsEstimate est;
  est.n_replicas = static_cast<int>(n);
  est.z_hat = z / static_cast<double>(n);
  est.q_mean = sum_wf / sum_w;
  est.ess = sum_w * sum_w / sum_w2;

  // Delta-method variance of the self-normalized ratio.
  double var = 0.0;
  for (const auto& s : samples) {
    const double w = std::exp(s.log_weight - max_lw) / sum_w;
    const double d = eval_functional(s, f, threshold) - est.q_mean;
    var += w * w * d * d;
  }
  est.q_se = std::sqrt(var);
  return est;
}

PriorSampler::PriorSampler(std::vector<ModeSpec> modes, DomainConfig cfg)
    : modes_(std::move(modes)), cfg_(std::move(cfg)) {
  cfg_.validate();
  kernels_.reserve(modes_.size());
  for (const auto& m : modes_) {
    if (m.n == 0)
      throw std::invalid_argument(
          "PriorSampler: zero mode has no stationary law");
    kernels_.push_back(build_transition(m, cfg_.dt()));
  }
}

std::vector<ModePath> PriorSampler::draw(RngStream& rng) const {
  std::vector<ModePath> paths;
  paths.reserve(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const ModeState init = sample_stationary(modes_[i], rng);
    paths.push_back(
        evolve_path(modes_[i], init, kernels_[i], cfg_.n_t, rng));
  }
  return paths;
}

FieldGrid PriorSampler::draw_field(RngStream& rng) const {
  return assemble_field(draw(rng), modes_, cfg_);
}

std::vector<GibbsSample> pcn_chain(const PriorSampler& prior, double beta,
                                   double rho, int n_steps, RngStream& rng,
                                   const BinRule& rule, double* acc_rate) {
  if (beta < 0.0) throw std::invalid_argument("pcn_chain: beta must be >= 0");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("pcn_chain: rho must be in (0, 1]");
  if (n_steps < 1) throw std::invalid_argument("pcn_chain: n_steps must be >= 1");

  const double keep = std::sqrt(1.0 - rho * rho);
  std::vector<ModePath> cur = prior.draw(rng);
  GibbsSample cur_sample =
      weigh(assemble_field(cur, prior.modes(), prior.cfg()), beta, rule);

  std::vector<GibbsSample> out;
  out.reserve(n_steps);
  int accepted = 0;
  for (int step = 0; step < n_steps; ++step) {
    std::vector<ModePath> prop = prior.draw(rng);
    for (std::size_t m = 0; m < prop.size(); ++m)
      for (std::size_t i = 0; i < prop[m].states.size(); ++i) {
        prop[m].states[i].a =
            keep * cur[m].states[i].a + rho * prop[m].states[i].a;
        prop[m].states[i].v =
            keep * cur[m].states[i].v + rho * prop[m].states[i].v;
      }
    GibbsSample prop_sample =
        weigh(assemble_field(prop, prior.modes(), prior.cfg()), beta, rule);
    const double log_acc = -beta * (prop_sample.phi - cur_sample.phi);
    if (std::log(rng.uniform()) < log_acc) {
      cur = std::move(prop);
      cur_sample = prop_sample;
      ++accepted;
    }
    cur_sample.replica_id = step;
    cur_sample.rng_stream_id = rng.stream_id();
    out.push_back(cur_sample);
  }
  if (acc_rate) *acc_rate = static_cast<double>(accepted) / n_steps;
  return out;
}

double batch_mean_se(std::span<const double> values, int n_batches) {
  if (n_batches < 2) throw std::invalid_argument("batch_mean_se: need >= 2 batches");
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(2 * n_batches))
    throw std::invalid_argument("batch_mean_se: chain too short for batching");
  const std::size_t len = n / n_batches;
  std::vector<double> means(n_batches, 0.0);
  for (int b = 0; b < n_batches; ++b) {
    for (std::size_t i = 0; i < len; ++i) means[b] += values[b * len + i];
    means[b] /= static_cast<double>(len);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= n_batches;
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= (n_batches - 1);
  return std::sqrt(var / n_batches);
}

}  // namespace wavepolymer
