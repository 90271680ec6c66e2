#include "glmsim/fit.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "glmsim/diagnostics.hpp"
#include "glmsim/error.hpp"
#include "glmsim/optimize.hpp"
#include "glmsim/rng.hpp"

namespace glmsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Admissible log_phi starting values tried in order.
constexpr double kLogPhiStarts[] = {0.0, 0.69314718055994531, 1.6094379124341003,
                                    2.3025850929940457, -0.69314718055994531,
                                    2.9957322735539909, -2.3025850929940457};

double z_value(double level) {
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, 0.5 * (1.0 + level));
}

double central_location(Family family, const std::vector<double>& y) {
  if (location_kind(family) == LocationKind::median) return quantile_type7(y, 0.5);
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

void check_rank(const Eigen::MatrixXd& X, const ModelSpec& spec) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw DataError("model " + describe(spec) + ": design matrix is rank deficient");
  }
}

}  // namespace

std::string_view to_string(FitMode m) noexcept { return m == FitMode::wald ? "wald" : "mcmc"; }

FitMode parse_fit_mode(std::string_view token) {
  if (token == "wald") return FitMode::wald;
  if (token == "mcmc") return FitMode::mcmc;
  throw ConfigError("unknown fit mode '" + std::string(token) + "'");
}

std::vector<std::vector<double>> FitResult::treatment_chains() const {
  std::vector<std::vector<double>> out;
  if (chains <= 0 || draws.rows() == 0) return out;
  const Eigen::Index per = draws.rows() / chains;
  for (int c = 0; c < chains; ++c) {
    std::vector<double> v(static_cast<std::size_t>(per));
    for (Eigen::Index s = 0; s < per; ++s) v[static_cast<std::size_t>(s)] = draws(c * per + s, kTreatmentIndex);
    out.push_back(std::move(v));
  }
  return out;
}

LikelihoodModel::LikelihoodModel(const ModelSpec& spec, const Dataset& data)
    : spec_(spec), X_(design_matrix(spec.formula, data)), y_(data.y) {
  validate(spec);
}

double LikelihoodModel::operator()(const Eigen::VectorXd& theta) const {
  const Eigen::Index k = X_.cols();
  if (theta.size() != k + 1 || !theta.allFinite()) return kInf;
  const double phi = std::exp(theta[k]);
  if (!valid_shape(spec_.family, phi)) return kInf;
  double total = 0.0;
  for (Eigen::Index i = 0; i < X_.rows(); ++i) {
    const double eta = X_.row(i).dot(theta.head(k));
    if (!std::isfinite(eta)) return kInf;
    const double mu = detail::inv_link_unchecked(spec_.link, eta);
    const double lp =
        detail::log_density_unchecked(spec_.family, y_[static_cast<std::size_t>(i)], mu, phi);
    if (!std::isfinite(lp)) return kInf;
    total -= lp;
  }
  return total;
}

double negative_log_likelihood(const ModelSpec& spec, const Dataset& data,
                               const Eigen::VectorXd& theta) {
  return LikelihoodModel(spec, data)(theta);
}

Eigen::VectorXd default_start(const ModelSpec& spec, const Dataset& data) {
  const int k = num_coefficients(spec.formula);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k + 1);
  const double centre = central_location(spec.family, data.y);
  const Support domain = link_domain(spec.link);
  double c = centre;
  if (domain == Support::unit_interval) c = std::clamp(centre, 1e-6, 1.0 - 1e-6);
  if (domain == Support::positive) c = std::max(centre, 1e-6);
  theta[0] = apply_link(spec.link, c);
  const LikelihoodModel model(spec, data);
  for (double lp : kLogPhiStarts) {
    theta[k] = lp;
    if (std::isfinite(model(theta))) return theta;
  }
  theta[k] = 0.0;
  return theta;
}

FitResult fit_mle(const ModelSpec& spec, const Dataset& data, const MleControls& controls) {
  const auto t0 = std::chrono::steady_clock::now();
  const LikelihoodModel model(spec, data);
  check_rank(model.design(), spec);

  FitResult fit;
  fit.spec = spec;
  fit.parameter_names = parameter_names(spec.formula);
  fit.diagnostics.mode = FitMode::wald;
  const Objective objective = [&model](const Eigen::VectorXd& th) { return model(th); };

  MinimizeOptions opts;
  opts.max_iterations = controls.max_iterations;
  opts.gradient_tolerance = controls.gradient_tolerance;
  const MinimizeResult opt = minimize_bfgs(objective, default_start(spec, data), opts);

  fit.estimates = opt.x;
  fit.diagnostics.iterations = opt.iterations;
  fit.diagnostics.gradient_norm = opt.gradient.allFinite() ? opt.gradient.norm() : kInf;
  fit.diagnostics.optimizer_converged = opt.converged;

  const Eigen::Index p = opt.x.size();
  fit.se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  if (std::isfinite(opt.value)) {
    const Eigen::MatrixXd info = numeric_hessian(objective, opt.x);
    if (info.allFinite()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
      if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0) {
        fit.diagnostics.information_pd = true;
        fit.vcov = info.inverse();
        fit.se = fit.vcov.diagonal().cwiseSqrt();
      }
    }
  }
  const double est = fit.treatment_estimate();
  const double se = fit.treatment_se();
  for (std::size_t l = 0; l < kIntervalLevels.size(); ++l) {
    const double half = z_value(kIntervalLevels[l]) * se;
    fit.intervals[l] = {est - half, est + half};
  }
  fit.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

FitResult fit_mcmc(const ModelSpec& spec, const Dataset& data, const McmcControls& controls) {
  const auto t0 = std::chrono::steady_clock::now();
  const LikelihoodModel model(spec, data);
  check_rank(model.design(), spec);
  if (controls.chains < 1 || controls.draws < 1 || controls.warmup < 0) {
    throw ConfigError("mcmc controls must have at least one chain and one draw");
  }
  const int P = model.num_parameters();
  const int S = controls.chains * controls.draws;

  FitResult fit;
  fit.spec = spec;
  fit.parameter_names = parameter_names(spec.formula);
  fit.diagnostics.mode = FitMode::mcmc;
  fit.chains = controls.chains;
  fit.draws.resize(S, P);

  long accepted_total = 0;
  for (int c = 0; c < controls.chains; ++c) {
    Rng rng(stable_hash(controls.seed, "chain" + std::to_string(c)));
    Eigen::VectorXd theta(P);
    double nll = kInf;
    for (int attempt = 0; attempt < 100 && !std::isfinite(nll); ++attempt) {
      for (int j = 0; j < P; ++j) {
        theta[j] = controls.init_radius * (2.0 * rng.uniform() - 1.0);
      }
      nll = model(theta);
    }
    if (!std::isfinite(nll)) {
      throw SamplerStuckError("model " + describe(spec) +
                              ": no finite initial point within the initialization range");
    }

    Eigen::VectorXd scale = Eigen::VectorXd::Constant(P, 0.1);
    double log_global = std::log(2.38 / std::sqrt(static_cast<double>(P)));
    Eigen::VectorXd proposal(P);
    std::vector<Eigen::VectorXd> window_draws;
    int window_accepts = 0;

    auto step = [&](bool adapting, int iter) -> bool {
      const double global = std::exp(log_global);
      for (int j = 0; j < P; ++j) proposal[j] = theta[j] + global * scale[j] * rng.normal();
      const double nll_prop = model(proposal);
      bool accept = false;
      if (std::isfinite(nll_prop)) {
        const double log_ratio = nll - nll_prop;
        accept = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
      } else {
        rng.uniform();
      }
      if (accept) {
        theta = proposal;
        nll = nll_prop;
      }
      if (adapting) {
        // Robbins-Monro on the global scale toward the target acceptance rate.
        const double gain = 1.0 / std::pow(static_cast<double>(iter + 1), 0.6);
        log_global += gain * ((accept ? 1.0 : 0.0) - controls.target_acceptance);
      }
      return accept;
    };

    for (int it = 0; it < controls.warmup; ++it) {
      if (step(true, it)) ++window_accepts;
      window_draws.push_back(theta);
      if (static_cast<int>(window_draws.size()) == controls.adaptation_window) {
        if (window_accepts == 0) {
          throw SamplerStuckError("model " + describe(spec) +
                                  ": every proposal rejected during a warmup window");
        }
        // Diagonal scale from the spread of the window, once it has moved.
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(P);
        for (const auto& d : window_draws) mean += d;
        mean /= static_cast<double>(window_draws.size());
        Eigen::VectorXd var = Eigen::VectorXd::Zero(P);
        for (const auto& d : window_draws) var += (d - mean).cwiseAbs2();
        var /= static_cast<double>(window_draws.size() - 1);
        for (int j = 0; j < P; ++j) {
          if (var[j] > 0.0) scale[j] = std::sqrt(var[j]);
        }
        // Re-centre the global scale after changing the per-coordinate scales.
        log_global = std::log(2.38 / std::sqrt(static_cast<double>(P)));
        window_draws.clear();
        window_accepts = 0;
      }
    }
    for (int s = 0; s < controls.draws; ++s) {
      if (step(false, 0)) ++accepted_total;
      fit.draws.row(static_cast<Eigen::Index>(c) * controls.draws + s) = theta.transpose();
    }
  }

  fit.diagnostics.acceptance_rate = static_cast<double>(accepted_total) / static_cast<double>(S);
  fit.estimates = fit.draws.colwise().mean().transpose();
  fit.se.resize(P);
  for (int j = 0; j < P; ++j) {
    const double m = fit.estimates[j];
    const double v = (fit.draws.col(j).array() - m).square().sum() / static_cast<double>(S - 1);
    fit.se[j] = std::sqrt(v);
  }
  std::vector<double> tx(fit.draws.col(kTreatmentIndex).data(),
                         fit.draws.col(kTreatmentIndex).data() + S);
  for (std::size_t l = 0; l < kIntervalLevels.size(); ++l) {
    const double tail = 0.5 * (1.0 - kIntervalLevels[l]);
    fit.intervals[l] = {quantile_type7(tx, tail), quantile_type7(tx, 1.0 - tail)};
  }
  if (controls.chains >= 2 && controls.draws >= 4) {
    const auto chains = fit.treatment_chains();
    const DiagnosticValue rhat = split_rhat(chains);
    const DiagnosticValue ess = ess_bulk(chains);
    fit.diagnostics.rhat = rhat.value;
    fit.diagnostics.ess = ess.value;
    fit.diagnostics.degenerate_chains = rhat.degenerate || ess.degenerate;
  } else {
    fit.diagnostics.degenerate_chains = true;
  }
  fit.diagnostics.n_divergent = 0;
  fit.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

bool converged(const FitResult& fit) {
  const auto& d = fit.diagnostics;
  if (d.mode == FitMode::wald) return d.optimizer_converged && d.information_pd;
  const double S = static_cast<double>(fit.draws.rows());
  return !d.degenerate_chains && d.rhat < 1.01 && d.ess > 400.0 * S / 4000.0 &&
         d.n_divergent < 10 && d.acceptance_rate >= 0.1 && d.acceptance_rate <= 0.6;
}

nlohmann::json to_json(const FitResult& fit) {
  using nlohmann::json;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json est = json::object(), se = json::object();
  for (std::size_t j = 0; j < fit.parameter_names.size(); ++j) {
    est[fit.parameter_names[j]] = num(fit.estimates[static_cast<Eigen::Index>(j)]);
    se[fit.parameter_names[j]] = num(fit.se[static_cast<Eigen::Index>(j)]);
  }
  json intervals = json::object();
  for (std::size_t l = 0; l < kIntervalLevels.size(); ++l) {
    const auto key = std::to_string(static_cast<int>(std::lround(kIntervalLevels[l] * 100)));
    intervals[key] = {num(fit.intervals[l].lo), num(fit.intervals[l].hi)};
  }
  const auto& d = fit.diagnostics;
  return json{{"family", to_string(fit.spec.family)},
              {"link", to_string(fit.spec.link)},
              {"formula", to_string(fit.spec.formula)},
              {"mode", to_string(d.mode)},
              {"estimates", est},
              {"se", se},
              {"intervals", intervals},
              {"diagnostics",
               {{"rhat", num(d.rhat)},
                {"ess", num(d.ess)},
                {"n_divergent", d.n_divergent},
                {"acceptance_rate", num(d.acceptance_rate)},
                {"optimizer_converged", d.optimizer_converged},
                {"information_pd", d.information_pd},
                {"gradient_norm", num(d.gradient_norm)},
                {"degenerate_chains", d.degenerate_chains},
                {"converged", converged(fit)}}},
              {"wall_time", fit.wall_seconds}};
}

}  // namespace glmsim
