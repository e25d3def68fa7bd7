#include <doctest.h>

#include <cmath>
#include <limits>

#include <stdexcept>
#include "wavepolymer/gibbs.hpp"

using namespace wavepolymer;

namespace {

DomainConfig small_cfg() {
  DomainConfig cfg;
  cfg.J = 1.0;
  cfg.T = 1.0;
  cfg.n_modes = 5;
  cfg.n_x = 32;
  cfg.n_t = 8;
  return cfg;
}

std::vector<ModeSpec> small_modes(const DomainConfig& cfg) {
  auto modes = build_eigenbasis(cfg);
  attach_spectrum(modes, 1.0, 2.0, SpectrumProfile::PowerLaw);
  std::vector<ModeSpec> nz;
  for (const auto& m : modes)
    if (m.n >= 1) nz.push_back(m);
  return nz;
}

GibbsSample with_weight(double log_w, double R) {
  GibbsSample s;
  s.log_weight = log_w;
  s.radius.R = R;
  return s;
}

}  // namespace

TEST_CASE("weigh: beta linearity and the beta=0 identity") {
  const auto cfg = small_cfg();
  PriorSampler prior(small_modes(cfg), cfg);
  RngStream rng(1, 0);
  const auto field = prior.draw_field(rng);
  const BinRule rule{256};
  CHECK(weigh(field, 0.0, rule).log_weight == 0.0);
  const auto s1 = weigh(field, 1.0, rule);
  const auto s2 = weigh(field, 2.0, rule);
  CHECK(s2.log_weight == doctest::Approx(2.0 * s1.log_weight).epsilon(1e-14));
  CHECK(s1.log_weight == doctest::Approx(-s1.phi).epsilon(1e-14));
  CHECK_THROWS_AS(weigh(field, -0.5, rule), std::invalid_argument);
}

TEST_CASE("estimate_q: degenerate two-point cases") {
  const std::vector<GibbsSample> pair = {with_weight(0.0, 3.0),
                                         with_weight(-1e6, 7.0)};
  const auto est = estimate_q(pair, QFunctional::Radius);
  CHECK(est.q_mean == doctest::Approx(3.0));
  CHECK(est.ess == doctest::Approx(1.0));

  const std::vector<GibbsSample> flat = {with_weight(0.0, 1.0),
                                         with_weight(0.0, 3.0)};
  const auto est2 = estimate_q(flat, QFunctional::Radius);
  CHECK(est2.q_mean == doctest::Approx(2.0));
  CHECK(est2.z_hat == doctest::Approx(1.0));
  CHECK(est2.ess == doctest::Approx(2.0));
  CHECK(estimate_q(flat, QFunctional::RadiusSq).q_mean == doctest::Approx(5.0));
  CHECK(estimate_q(flat, QFunctional::IndicatorRadiusBelow, 10.0).q_mean ==
        doctest::Approx(1.0));
  CHECK(estimate_q(flat, QFunctional::IndicatorRadiusAbove, 2.0).q_mean ==
        doctest::Approx(0.5));

  CHECK_THROWS_AS(estimate_q({pair.data(), 1}, QFunctional::Radius),
                  std::invalid_argument);
  const std::vector<GibbsSample> dead = {
      with_weight(-std::numeric_limits<double>::infinity(), 1.0),
      with_weight(-std::numeric_limits<double>::infinity(), 2.0)};
  CHECK_THROWS_WITH_AS(estimate_q(dead, QFunctional::Radius),
                       doctest::Contains("DegenerateWeights"),
                       std::runtime_error);
}

TEST_CASE("z_hat is monotone in beta on a fixed replica set") {
  const auto cfg = small_cfg();
  PriorSampler prior(small_modes(cfg), cfg);
  RngStream rng(3, 0);
  std::vector<FieldGrid> fields;
  for (int i = 0; i < 10; ++i) fields.push_back(prior.draw_field(rng));
  double prev = 1.0;
  for (double beta : {0.0, 0.1, 0.5, 1.0, 5.0}) {
    std::vector<GibbsSample> samples;
    for (const auto& f : fields) samples.push_back(weigh(f, beta, BinRule{64}));
    const double z = estimate_q(samples, QFunctional::Radius).z_hat;
    CHECK(z <= prev + 1e-15);
    CHECK(z > 0.0);
    CHECK(z <= 1.0);
    prev = z;
  }
}

TEST_CASE("pCN at beta=0 accepts everything and reproduces the prior") {
  const auto cfg = small_cfg();
  PriorSampler prior(small_modes(cfg), cfg);
  RngStream rng(7, 0);
  double acc = 0.0;
  const auto chain = pcn_chain(prior, 0.0, 0.5, 400, rng, BinRule{64}, &acc);
  CHECK(acc == 1.0);
  CHECK(chain.size() == 400);

  // chain marginal of R^2 vs the exact prior mean sum Var[a_n]/J
  double mean_r2 = 0.0;
  for (const auto& s : chain) mean_r2 += s.radius.R * s.radius.R;
  mean_r2 /= chain.size();
  double expect = 0.0;
  for (const auto& m : small_modes(cfg))
    expect += stationary_variance(m).var_a / cfg.J;
  CHECK(mean_r2 == doctest::Approx(expect).epsilon(0.25));
}

TEST_CASE("pCN guards its inputs") {
  const auto cfg = small_cfg();
  PriorSampler prior(small_modes(cfg), cfg);
  RngStream rng(7, 1);
  CHECK_THROWS_AS(pcn_chain(prior, 0.5, 0.0, 10, rng, BinRule{64}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pcn_chain(prior, 0.5, 1.5, 10, rng, BinRule{64}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pcn_chain(prior, -1.0, 0.5, 10, rng, BinRule{64}),
                  std::invalid_argument);
}

TEST_CASE("IS and pCN agree on the small instance") {
  DomainConfig cfg;
  cfg.J = 1.0;
  cfg.T = 1.0;
  cfg.n_modes = 5;  // modes 1..4 after dropping the zero mode
  cfg.n_x = 32;
  cfg.n_t = 8;
  const auto modes = small_modes(cfg);
  PriorSampler prior(modes, cfg);
  const double beta = 0.5;

  RngStream rng_is(11, 0);
  std::vector<GibbsSample> samples;
  for (int r = 0; r < 600; ++r)
    samples.push_back(weigh(prior.draw_field(rng_is), beta, BinRule{64}));
  const auto est = estimate_q(samples, QFunctional::Radius);

  RngStream rng_pcn(11, 1);
  const auto chain = pcn_chain(prior, beta, 0.4, 3000, rng_pcn, BinRule{64});
  std::vector<double> radii;
  for (std::size_t i = 500; i < chain.size(); ++i)
    radii.push_back(chain[i].radius.R);
  double mean = 0.0;
  for (double r : radii) mean += r;
  mean /= radii.size();
  const double se_pcn = batch_mean_se(radii);
  const double combined = std::hypot(est.q_se, se_pcn);
  CHECK(std::abs(mean - est.q_mean) < 4.0 * combined);
}

TEST_CASE("batch-means SE roughly matches iid expectations") {
  RngStream rng(9, 4);
  std::vector<double> v(8192);
  for (auto& x : v) x = rng.normal();
  const double se = batch_mean_se(v);
  const double iid = 1.0 / std::sqrt(8192.0);
  CHECK(se > 0.3 * iid);
  CHECK(se < 3.0 * iid);
  CHECK_THROWS_AS(batch_mean_se({v.data(), 10}, 32), std::invalid_argument);
}

TEST_CASE("PriorSampler rejects the zero mode") {
  const auto cfg = small_cfg();
  auto modes = build_eigenbasis(cfg);
  attach_spectrum(modes, 1.0, 2.0, SpectrumProfile::PowerLaw);
  CHECK_THROWS_AS(PriorSampler(modes, cfg), std::invalid_argument);
}
