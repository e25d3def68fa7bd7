#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wavepolymer/field_radius.hpp"
#include "wavepolymer/localtime.hpp"

namespace wavepolymer {

// One weighted replica under the polymer measure: w = exp(-beta * Phi).
// Weights live in the log domain; exp() is only taken inside the stabilized
// estimators (log_weight <= 0 always, so exp never overflows, only underflows).
struct GibbsSample {
  double phi = 0.0;
  double log_weight = 0.0;  // = -beta * phi
  RadiusStat radius;
  int replica_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t rng_stream_id = 0;
};

enum class QFunctional {
  Radius,
  RadiusSq,
  IndicatorRadiusBelow,
  IndicatorRadiusAbove,
};

struct GibbsEstimate {
  double z_hat = 0.0;   // plain mean of the weights, in (0, 1]
  double q_mean = 0.0;  // self-normalized importance estimate
  double q_se = 0.0;    // delta-method SE of q_mean
  double ess = 0.0;     // (sum w)^2 / sum w^2
  int n_replicas = 0;
};

GibbsSample weigh(const FieldGrid& field, double beta, const BinRule& rule);

// threshold is only read for the indicator functionals.
GibbsEstimate estimate_q(std::span<const GibbsSample> samples, QFunctional f,
                         double threshold = 0.0);

// Exact stationary draws of the truncated mode system; kernels are built once.
class PriorSampler {
 public:
  PriorSampler(std::vector<ModeSpec> modes, DomainConfig cfg);

  std::vector<ModePath> draw(RngStream& rng) const;
  FieldGrid draw_field(RngStream& rng) const;

  const std::vector<ModeSpec>& modes() const { return modes_; }
  const DomainConfig& cfg() const { return cfg_; }

 private:
  std::vector<ModeSpec> modes_;
  DomainConfig cfg_;
  std::vector<TransitionKernel> kernels_;
};

// Metropolis chain with pCN proposal u' = sqrt(1-rho^2) u + rho xi, xi a fresh
// prior draw. The proposal preserves the Gaussian prior over whole mode paths,
// so acceptance depends only on beta * (Phi' - Phi); invariant law is Q.
// Returns one sample per step (post-move state, including rejections).
std::vector<GibbsSample> pcn_chain(const PriorSampler& prior, double beta,
                                   double rho, int n_steps, RngStream& rng,
                                   const BinRule& rule,
                                   double* acc_rate = nullptr);

// Batch-means standard error for a correlated chain of scalars.
double batch_mean_se(std::span<const double> values, int n_batches = 32);

}  // namespace wavepolymer
