#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "glmsim/dgp.hpp"
#include "glmsim/model.hpp"

namespace glmsim {

enum class FitMode { wald, mcmc };

std::string_view to_string(FitMode m) noexcept;
FitMode parse_fit_mode(std::string_view token);

inline constexpr std::array<double, 4> kIntervalLevels = {0.5, 0.8, 0.9, 0.95};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitDiagnostics {
  FitMode mode = FitMode::wald;
  double rhat = std::numeric_limits<double>::quiet_NaN();
  double ess = std::numeric_limits<double>::quiet_NaN();
  bool degenerate_chains = false;
  int n_divergent = 0;  // always 0 for random-walk Metropolis
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  bool optimizer_converged = false;
  bool information_pd = false;
  double gradient_norm = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

struct FitResult {
  ModelSpec spec;
  std::vector<std::string> parameter_names;
  Eigen::VectorXd estimates;  // MLE (wald) or posterior mean (mcmc)
  Eigen::VectorXd se;         // sqrt(diag(vcov)) or posterior sd
  Eigen::MatrixXd vcov;       // inverse observed information; empty in mcmc mode
  Eigen::MatrixXd draws;      // (chains * draws_per_chain) x P, chain-major; empty in wald mode
  int chains = 0;
  std::array<Interval, kIntervalLevels.size()> intervals{};  // for the treatment coefficient
  FitDiagnostics diagnostics;
  double wall_seconds = 0.0;

  double treatment_estimate() const { return estimates[kTreatmentIndex]; }
  double treatment_se() const { return se[kTreatmentIndex]; }
  // Treatment draws grouped by chain (mcmc mode only).
  std::vector<std::vector<double>> treatment_chains() const;
};

struct MleControls {
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;
};

struct McmcControls {
  int chains = 2;
  int warmup = 500;
  int draws = 2000;
  std::uint64_t seed = 1;
  double init_radius = 0.1;
  double target_acceptance = 0.234;
  int adaptation_window = 50;
};

// Likelihood of one model on one dataset with the design matrix built once.
// theta = (coefficients..., log_phi).
class LikelihoodModel {
 public:
  LikelihoodModel(const ModelSpec& spec, const Dataset& data);

  // Sum of -log density; +inf for points outside the valid region.
  double operator()(const Eigen::VectorXd& theta) const;

  const ModelSpec& spec() const noexcept { return spec_; }
  const Eigen::MatrixXd& design() const noexcept { return X_; }
  const std::vector<double>& response() const noexcept { return y_; }
  int num_parameters() const noexcept { return static_cast<int>(X_.cols()) + 1; }

 private:
  ModelSpec spec_;
  Eigen::MatrixXd X_;
  std::vector<double> y_;
};

// Flat-prior objective: -sum log density. Returns +inf as a sentinel where undefined.
double negative_log_likelihood(const ModelSpec& spec, const Dataset& data,
                               const Eigen::VectorXd& theta);

// Deterministic optimizer start: intercept = link(central location of y),
// slopes = 0, log_phi = 0 (or the first admissible fallback when phi = 1 is invalid).
Eigen::VectorXd default_start(const ModelSpec& spec, const Dataset& data);

// Maximum likelihood with Wald summaries. Throws DataError for a rank-deficient design.
FitResult fit_mle(const ModelSpec& spec, const Dataset& data, const MleControls& controls = {});

// Adaptive random-walk Metropolis on the unconstrained parameters. Throws
// SamplerStuckError if a whole warmup window rejects every proposal.
FitResult fit_mcmc(const ModelSpec& spec, const Dataset& data, const McmcControls& controls = {});

// mcmc: rhat < 1.01, ess > 400 * S / 4000, fewer than 10 divergences, non-degenerate
// chains and acceptance in [0.1, 0.6]. wald: optimizer converged and information PD.
bool converged(const FitResult& fit);

nlohmann::json to_json(const FitResult& fit);

}  // namespace glmsim
