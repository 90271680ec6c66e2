#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glmsim/dgp.hpp"
#include "glmsim/fit.hpp"
#include "glmsim/model.hpp"

namespace glmsim {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// One row of the results table.
struct CellRecord {
  Support domain = Support::unit_interval;
  Family dgp_family = Family::beta;
  ShapeKind dgp_shape = ShapeKind::symmetric;
  Link dgp_link = Link::logit;
  Effect effect = Effect::zero;
  ModelSpec model;
  int replicate = 0;
  std::uint64_t seed = 0;
  FitMode mode = FitMode::wald;
  bool converged = false;
  // NaN when undefined (fit link differs from the DGP link, or the fit failed).
  double bias = kUndefined;
  double abs_bias = kUndefined;
  double rmse = kUndefined;
  std::array<bool, kIntervalLevels.size()> significant{};
  std::string error;  // empty unless the job failed
};

// Posterior bias: mean(draws) - truth. Throws InputError on empty draws.
double bias(std::span<const double> draws, double truth);
// sqrt(bias^2 + Var), variance with divisor S. Throws InputError on fewer than 2 draws.
double rmse(std::span<const double> draws, double truth);

double wald_bias(double estimate, double truth);
// sqrt((estimate - truth)^2 + se^2).
double wald_rmse(double estimate, double se, double truth);

// True iff 0 lies strictly outside [lo, hi].
bool significance(const Interval& interval) noexcept;

// Index of a level in kIntervalLevels; throws InputError if not one of them.
std::size_t level_index(double level);

struct ErrorRates {
  double fpr = kUndefined;  // NaN for an empty zero-effect stratum
  double tpr = kUndefined;  // NaN for an empty positive-effect stratum
  int n_zero = 0;
  int n_positive = 0;
};

// Rates among converged, error-free records.
ErrorRates error_rates(std::span<const CellRecord> records, double level);

struct RocPoint {
  double level = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct Roc {
  std::vector<RocPoint> points;  // one per level, sorted by fpr (then tpr)
  double auc = kUndefined;       // NaN if either stratum is empty
};

// Trapezoidal area under the polyline (0,0) -> points -> (1,1).
double trapezoid_auc(std::vector<std::pair<double, double>> points);

Roc roc_and_auc(std::span<const CellRecord> records);

// Record for one fit. bias/rmse are filled only when the fit link equals the DGP link.
CellRecord make_cell_record(const DgpConfig& dgp, int replicate, std::uint64_t seed,
                            const FitResult& fit);

// Record for a job that threw before producing a fit.
CellRecord make_error_record(const DgpConfig& dgp, const ModelSpec& model, int replicate,
                             std::uint64_t seed, FitMode mode, std::string message);

}  // namespace glmsim
