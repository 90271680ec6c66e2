#include "glmsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "glmsim/error.hpp"

namespace glmsim {

double bias(std::span<const double> draws, double truth) {
  if (draws.empty()) throw InputError("bias: no draws");
  double s = 0.0;
  for (double d : draws) s += d;
  return s / static_cast<double>(draws.size()) - truth;
}

double rmse(std::span<const double> draws, double truth) {
  if (draws.size() < 2) throw InputError("rmse: need at least two draws");
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= n;
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= n;
  const double b = mean - truth;
  return std::sqrt(b * b + var);
}

double wald_bias(double estimate, double truth) {
  if (!std::isfinite(estimate)) throw InputError("bias: non-finite estimate");
  return estimate - truth;
}

double wald_rmse(double estimate, double se, double truth) {
  if (!std::isfinite(estimate)) throw InputError("rmse: non-finite estimate");
  const double b = estimate - truth;
  return std::sqrt(b * b + se * se);
}

bool significance(const Interval& interval) noexcept {
  return interval.lo > 0.0 || interval.hi < 0.0;
}

std::size_t level_index(double level) {
  for (std::size_t i = 0; i < kIntervalLevels.size(); ++i) {
    if (std::abs(kIntervalLevels[i] - level) < 1e-12) return i;
  }
  throw InputError("unsupported interval level " + std::to_string(level));
}

ErrorRates error_rates(std::span<const CellRecord> records, double level) {
  const std::size_t li = level_index(level);
  ErrorRates r;
  int sig_zero = 0, sig_pos = 0;
  for (const auto& rec : records) {
    if (!rec.converged || !rec.error.empty()) continue;
    if (rec.effect == Effect::zero) {
      ++r.n_zero;
      sig_zero += rec.significant[li] ? 1 : 0;
    } else {
      ++r.n_positive;
      sig_pos += rec.significant[li] ? 1 : 0;
    }
  }
  if (r.n_zero > 0) r.fpr = static_cast<double>(sig_zero) / r.n_zero;
  if (r.n_positive > 0) r.tpr = static_cast<double>(sig_pos) / r.n_positive;
  return r;
}

double trapezoid_auc(std::vector<std::pair<double, double>> points) {
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += 0.5 * (points[i].first - points[i - 1].first) *
            (points[i].second + points[i - 1].second);
  }
  return std::clamp(area, 0.0, 1.0);
}

Roc roc_and_auc(std::span<const CellRecord> records) {
  Roc roc;
  bool defined = true;
  for (double level : kIntervalLevels) {
    const ErrorRates r = error_rates(records, level);
    if (std::isnan(r.fpr) || std::isnan(r.tpr)) defined = false;
    roc.points.push_back({level, r.fpr, r.tpr});
  }
  if (!defined) return roc;
  std::sort(roc.points.begin(), roc.points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : roc.points) pts.emplace_back(p.fpr, p.tpr);
  roc.auc = trapezoid_auc(std::move(pts));
  return roc;
}

namespace {

CellRecord skeleton(const DgpConfig& dgp, const ModelSpec& model, int replicate,
                    std::uint64_t seed, FitMode mode) {
  CellRecord rec;
  rec.domain = family_support(dgp.family);
  rec.dgp_family = dgp.family;
  rec.dgp_shape = dgp.shape;
  rec.dgp_link = dgp.link;
  rec.effect = dgp.effect;
  rec.model = model;
  rec.replicate = replicate;
  rec.seed = seed;
  rec.mode = mode;
  return rec;
}

}  // namespace

CellRecord make_cell_record(const DgpConfig& dgp, int replicate, std::uint64_t seed,
                            const FitResult& fit) {
  CellRecord rec = skeleton(dgp, fit.spec, replicate, seed, fit.diagnostics.mode);
  rec.converged = converged(fit);
  for (std::size_t l = 0; l < kIntervalLevels.size(); ++l) {
    rec.significant[l] = significance(fit.intervals[l]);
  }
  const double truth = dgp.coef.beta_xy;
  // Coefficients on different link scales are not comparable.
  if (fit.spec.link == dgp.link && std::isfinite(fit.treatment_estimate())) {
    if (fit.diagnostics.mode == FitMode::mcmc) {
      const auto col = fit.draws.col(kTreatmentIndex);
      const std::vector<double> tx(col.data(), col.data() + col.size());
      rec.bias = bias(tx, truth);
      rec.rmse = rmse(tx, truth);
    } else {
      rec.bias = wald_bias(fit.treatment_estimate(), truth);
      const double se = fit.treatment_se();
      rec.rmse = std::isfinite(se) ? wald_rmse(fit.treatment_estimate(), se, truth) : kUndefined;
    }
    rec.abs_bias = std::abs(rec.bias);
  }
  return rec;
}

CellRecord make_error_record(const DgpConfig& dgp, const ModelSpec& model, int replicate,
                             std::uint64_t seed, FitMode mode, std::string message) {
  CellRecord rec = skeleton(dgp, model, replicate, seed, mode);
  rec.error = std::move(message);
  return rec;
}

}  // namespace glmsim
