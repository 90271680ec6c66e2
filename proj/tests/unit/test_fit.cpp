#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <nlohmann/json.hpp>

#include "glmsim/diagnostics.hpp"
#include "glmsim/error.hpp"
#include "glmsim/fit.hpp"
#include "glmsim/optimize.hpp"

using namespace glmsim;

namespace {

Dataset data_for(Family f, ShapeKind s, Link l, Effect e, std::uint64_t seed, int n = 100) {
  auto cfg = make_dgp_config(f, s, l, e);
  cfg.n_obs = n;
  return generate(cfg, seed);
}

// Closed-form least squares and the ML residual scale.
std::pair<Eigen::VectorXd, double> ols(const Dataset& d, Formula f) {
  const Eigen::MatrixXd X = design_matrix(f, d);
  const Eigen::Map<const Eigen::VectorXd> y(d.y.data(), static_cast<Eigen::Index>(d.size()));
  const Eigen::VectorXd b = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  const double rss = (y - X * b).squaredNorm();
  return {b, std::sqrt(rss / static_cast<double>(d.size()))};
}

}  // namespace

TEST_CASE("normal+identity: OLS is a stationary point and the MLE") {
  const auto d = data_for(Family::beta, ShapeKind::asymmetric, Link::logit, Effect::positive, 4);
  for (Formula f : kAllFormulas) {
    const auto [b, sigma] = ols(d, f);
    Eigen::VectorXd theta(b.size() + 1);
    theta << b, std::log(sigma);
    const ModelSpec spec{Family::normal, Link::identity, f};
    const LikelihoodModel m(spec, d);
    const Objective obj = [&m](const Eigen::VectorXd& t) { return m(t); };
    CHECK(numeric_gradient(obj, theta).norm() < 1e-6);

    const auto fit = fit_mle(spec, d);
    CHECK(converged(fit));
    for (Eigen::Index j = 0; j < b.size(); ++j) CHECK(std::abs(fit.estimates[j] - b[j]) < 1e-8);
    CHECK(std::abs(std::exp(fit.estimates[b.size()]) - sigma) < 1e-8);
  }
}

TEST_CASE("MLE is a minimum of the NLL") {
  const auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero, 17);
  const ModelSpec spec{Family::beta, Link::logit, Formula::ideal};
  const auto fit = fit_mle(spec, d);
  REQUIRE(converged(fit));
  const double best = negative_log_likelihood(spec, d, fit.estimates);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd t = fit.estimates;
    for (Eigen::Index j = 0; j < t.size(); ++j) t[j] += 0.3 * rng.normal();
    CHECK(negative_log_likelihood(spec, d, t) >= best);
  }
}

TEST_CASE("gamma+log NLL at the truth matches the conditional entropy") {
  auto cfg = make_dgp_config(Family::gamma, ShapeKind::thin_tail, Link::log, Effect::positive);
  cfg.n_obs = 10000;
  const auto d = generate(cfg, 123);
  const auto& c = cfg.coef;
  Eigen::VectorXd theta(5);
  theta << cfg.alpha_y, c.beta_xy, c.beta_z1y, c.beta_z2y, std::log(cfg.phi);
  const double nll = negative_log_likelihood({Family::gamma, Link::log, Formula::ideal}, d, theta);
  // Gamma(k, rate) entropy: k - log(rate) + lgamma(k) + (1 - k) digamma(k), rate = k / mu.
  const double k = cfg.phi;
  double h = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double mu = std::exp(cfg.alpha_y + c.beta_xy * d.x[i] + c.beta_z1y * d.z1[i] + c.beta_z2y * d.z2[i]);
    h += k - std::log(k / mu) + std::lgamma(k) + (1 - k) * boost::math::digamma(k);
  }
  CHECK(std::abs(nll / d.size() - h / d.size()) < 0.01);
}

TEST_CASE("sentinel outside the valid region") {
  const auto d = data_for(Family::gamma, ShapeKind::ramp, Link::log, Effect::zero, 2);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(5);
  CHECK(std::isfinite(negative_log_likelihood({Family::gamma, Link::log, Formula::ideal}, d, t)));
  // phi = 1 is not an admissible Frechet shape.
  CHECK(negative_log_likelihood({Family::frechet, Link::log, Formula::ideal}, d, t) == INFINITY);
  t[0] = NAN;
  CHECK(negative_log_likelihood({Family::gamma, Link::log, Formula::ideal}, d, t) == INFINITY);
  CHECK(negative_log_likelihood({Family::gamma, Link::log, Formula::ideal}, d, Eigen::VectorXd::Zero(3)) == INFINITY);
}

TEST_CASE("default start is admissible for every family") {
  const auto du = data_for(Family::beta, ShapeKind::asymmetric, Link::logit, Effect::zero, 6);
  const auto dp = data_for(Family::gamma, ShapeKind::heavy_tail, Link::log, Effect::zero, 6);
  for (Family f : kAllFamilies) {
    const bool unit = family_support(f) != Support::positive;
    const Link link = f == Family::normal ? Link::identity : unit ? Link::logit : Link::log;
    const ModelSpec spec{f, link, Formula::ideal};
    const auto& d = unit ? du : dp;
    const auto start = default_start(spec, d);
    CAPTURE(describe(spec));
    CHECK(std::isfinite(negative_log_likelihood(spec, d, start)));
    CHECK(start[1] == 0.0);
  }
}

TEST_CASE("boundary-clamped responses still fit") {
  auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero, 31);
  for (int i = 0; i < 5; ++i) d.y[i] = i % 2 ? 1 - d.config.epsilon : d.config.epsilon;
  const auto fit = fit_mle({Family::beta, Link::logit, Formula::ideal}, d);
  CHECK(converged(fit));
}

TEST_CASE("rank-deficient design is a data error") {
  auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero, 1);
  d.z2 = d.z1;
  CHECK_THROWS_AS(fit_mle({Family::beta, Link::logit, Formula::ideal}, d), DataError);
  CHECK_THROWS_AS(fit_mcmc({Family::beta, Link::logit, Formula::ideal}, d), DataError);
  CHECK_THROWS_AS(fit_mle({Family::beta, Link::log, Formula::ideal}, d), ConfigError);
}

TEST_CASE("Wald intervals are nested and centred") {
  const auto d = data_for(Family::kumaraswamy, ShapeKind::asymmetric, Link::cloglog, Effect::positive, 8);
  const auto fit = fit_mle({Family::kumaraswamy, Link::cloglog, Formula::include_z3}, d);
  REQUIRE(converged(fit));
  for (std::size_t l = 1; l < kIntervalLevels.size(); ++l) {
    CHECK(fit.intervals[l].lo <= fit.intervals[l - 1].lo);
    CHECK(fit.intervals[l].hi >= fit.intervals[l - 1].hi);
  }
  CHECK(0.5 * (fit.intervals[3].lo + fit.intervals[3].hi) == doctest::Approx(fit.treatment_estimate()));
  CHECK(fit.intervals[3].hi - fit.treatment_estimate() == doctest::Approx(1.959964 * fit.treatment_se()).epsilon(1e-6));
  CHECK(fit.vcov.rows() == 6);
  CHECK(fit.draws.size() == 0);
}

TEST_CASE("rescaling x rescales its estimate and interval") {
  const auto d = data_for(Family::gamma, ShapeKind::thin_tail, Link::log, Effect::positive, 13);
  const ModelSpec spec{Family::gamma, Link::log, Formula::ideal};
  const auto a = fit_mle(spec, d);
  for (double c : {0.5, 4.0}) {
    Dataset s = d;
    for (auto& v : s.x) v *= c;
    const auto b = fit_mle(spec, s);
    CHECK(b.treatment_estimate() == doctest::Approx(a.treatment_estimate() / c).epsilon(1e-4));
    CHECK(b.intervals[3].lo == doctest::Approx(a.intervals[3].lo / c).epsilon(1e-4));
    CHECK(b.intervals[3].hi == doctest::Approx(a.intervals[3].hi / c).epsilon(1e-4));
  }
}

TEST_CASE("MLE consistency at n = 10000") {
  int covered = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto d = data_for(Family::gamma, ShapeKind::thin_tail, Link::log, Effect::positive, 500 + r, 10000);
    const auto fit = fit_mle({Family::gamma, Link::log, Formula::ideal}, d);
    covered += std::abs(fit.treatment_estimate() - kPositiveEffect) < 5 * fit.treatment_se();
  }
  CHECK(covered >= 95);
}

TEST_CASE("convergence rules") {
  FitResult f;
  f.diagnostics.mode = FitMode::wald;
  f.diagnostics.optimizer_converged = true;
  f.diagnostics.information_pd = true;
  CHECK(converged(f));
  f.diagnostics.information_pd = false;
  CHECK_FALSE(converged(f));

  FitResult m;
  m.diagnostics.mode = FitMode::mcmc;
  m.draws = Eigen::MatrixXd::Zero(4000, 5);
  m.diagnostics.rhat = 1.005;
  m.diagnostics.ess = 1000;
  m.diagnostics.acceptance_rate = 0.25;
  CHECK(converged(m));
  m.diagnostics.rhat = 1.02;
  CHECK_FALSE(converged(m));
  m.diagnostics.rhat = 1.005;
  m.diagnostics.ess = 350;
  CHECK_FALSE(converged(m));
  m.diagnostics.ess = 1000;
  m.diagnostics.n_divergent = 10;
  CHECK_FALSE(converged(m));
  m.diagnostics.n_divergent = 0;
  m.diagnostics.acceptance_rate = 0.05;
  CHECK_FALSE(converged(m));
  m.diagnostics.acceptance_rate = 0.25;
  m.diagnostics.degenerate_chains = true;
  CHECK_FALSE(converged(m));
}

TEST_CASE("mcmc: flat-prior normal regression centres on OLS") {
  const auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::positive, 77);
  const auto [b, sigma] = ols(d, Formula::ideal);
  McmcControls mc;
  mc.seed = 5;
  mc.draws = 400000;  // the 0.02 sd tolerance needs a small Monte Carlo error
  const auto fit = fit_mcmc({Family::normal, Link::identity, Formula::ideal}, d, mc);
  CHECK(std::abs(fit.treatment_estimate() - b[1]) < 0.02 * fit.treatment_se());
}

TEST_CASE("mcmc: draws, intervals and reproducibility") {
  const auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero, 3);
  const ModelSpec spec{Family::beta, Link::logit, Formula::ideal};
  McmcControls mc;
  mc.seed = 99;
  const auto a = fit_mcmc(spec, d, mc);
  const auto b = fit_mcmc(spec, d, mc);
  CHECK(a.draws.rows() == 4000);
  CHECK(a.chains == 2);
  CHECK((a.draws.array() == b.draws.array()).all());
  CHECK(a.diagnostics.n_divergent == 0);
  CHECK(a.diagnostics.acceptance_rate > 0.1);
  CHECK(a.diagnostics.acceptance_rate < 0.6);
  CHECK(a.diagnostics.rhat < 1.05);
  for (std::size_t l = 1; l < kIntervalLevels.size(); ++l) {
    CHECK(a.intervals[l].lo <= a.intervals[l - 1].lo);
    CHECK(a.intervals[l].hi >= a.intervals[l - 1].hi);
  }
  CHECK(a.intervals[3].lo <= a.intervals[3].hi);

  // Posterior mean vs MLE within three Monte Carlo standard errors.
  const auto mle = fit_mle(spec, d);
  const auto chains = a.treatment_chains();
  const double mcse = a.treatment_se() / std::sqrt(ess_basic(chains));
  CHECK(std::abs(a.treatment_estimate() - mle.treatment_estimate()) < 3 * mcse);
}

TEST_CASE("fit result json") {
  const auto d = data_for(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero, 3);
  const auto fit = fit_mle({Family::simplex, Link::cauchit, Formula::omit_z2}, d);
  const auto j = to_json(fit);
  CHECK(j.at("family") == "simplex");
  CHECK(j.at("formula") == "x+z1");
  CHECK(j.at("estimates").contains("log_phi"));
  CHECK(j.at("intervals").at("95").size() == 2);
  CHECK(j.at("diagnostics").at("converged").get<bool>() == converged(fit));
}
