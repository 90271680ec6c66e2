#include "glmsim/shapes.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "glmsim/error.hpp"

namespace glmsim {

namespace {

struct PresetEntry {
  Family family;
  ShapeKind kind;
  double location;
  double phi;
};

// (location, phi) per family x archetype; each entry is checked against
// satisfies_archetype in the test suite.
constexpr PresetEntry kPresets[] = {
    {Family::beta, ShapeKind::symmetric, 0.5, 10.0},
    {Family::beta, ShapeKind::asymmetric, 0.25, 10.0},
    {Family::beta, ShapeKind::bathtub, 0.5, 1.5},
    {Family::kumaraswamy, ShapeKind::symmetric, 0.5, 2.5},
    {Family::kumaraswamy, ShapeKind::asymmetric, 0.25, 3.0},
    {Family::kumaraswamy, ShapeKind::bathtub, 0.5, 0.5},
    {Family::simplex, ShapeKind::symmetric, 0.5, 1.0},
    {Family::simplex, ShapeKind::asymmetric, 0.25, 1.0},
    {Family::simplex, ShapeKind::bathtub, 0.5, 5.0},
    {Family::logit_normal, ShapeKind::symmetric, 0.5, 0.6},
    {Family::logit_normal, ShapeKind::asymmetric, 0.25, 0.6},
    {Family::logit_normal, ShapeKind::bathtub, 0.5, 2.5},
    {Family::cauchit_normal, ShapeKind::symmetric, 0.5, 0.45},
    {Family::cauchit_normal, ShapeKind::asymmetric, 0.25, 0.5},
    {Family::cauchit_normal, ShapeKind::bathtub, 0.5, 3.0},
    {Family::cloglog_normal, ShapeKind::symmetric, 0.5, 0.3},
    {Family::cloglog_normal, ShapeKind::asymmetric, 0.25, 0.5},
    // Larger sigma piles mass within rounding distance of 1 (y = 1 - exp(-e^z)).
    {Family::cloglog_normal, ShapeKind::bathtub, 0.3, 1.0},
    {Family::gamma, ShapeKind::ramp, 1.0, 1.0},
    {Family::gamma, ShapeKind::heavy_tail, 1.0, 1.2},
    {Family::gamma, ShapeKind::thin_tail, 1.0, 10.0},
    {Family::weibull, ShapeKind::ramp, 1.0, 1.0},
    {Family::weibull, ShapeKind::heavy_tail, 1.0, 1.1},
    {Family::weibull, ShapeKind::thin_tail, 1.0, 4.0},
    {Family::frechet, ShapeKind::ramp, 1.0, 1.1},
    {Family::frechet, ShapeKind::heavy_tail, 1.0, 1.8},
    {Family::frechet, ShapeKind::thin_tail, 1.0, 25.0},
    {Family::beta_prime, ShapeKind::ramp, 0.5, 0.5},
    {Family::beta_prime, ShapeKind::heavy_tail, 1.0, 1.5},
    {Family::beta_prime, ShapeKind::thin_tail, 1.0, 30.0},
    {Family::gompertz, ShapeKind::ramp, 1.0, 1.0},
    {Family::gompertz, ShapeKind::heavy_tail, 1.0, 20.0},
    {Family::gompertz, ShapeKind::thin_tail, 1.0, 0.1},
    {Family::log_normal, ShapeKind::ramp, 1.0, 1.5},
    {Family::log_normal, ShapeKind::heavy_tail, 1.0, 0.6},
    {Family::log_normal, ShapeKind::thin_tail, 1.0, 0.2},
    {Family::softplus_normal, ShapeKind::ramp, 0.5, 2.0},
    {Family::softplus_normal, ShapeKind::heavy_tail, 0.3, 1.5},
    {Family::softplus_normal, ShapeKind::thin_tail, 3.0, 0.5},
};

double density(Family f, double y, double mu, double phi) {
  const double lp = detail::log_density_unchecked(f, y, mu, phi);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

template <class F>
double integrate_unit(F&& g, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(g, a, b);
}

// Integrates y -> (y - centre)^k f(y) over (0, inf).
template <class F>
double positive_moment(F&& pdf, double centre, int k, double split) {
  auto g = [&](double y) {
    const double d = pdf(y);
    return d == 0.0 ? 0.0 : std::pow(y - centre, k) * d;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return ts.integrate(g, 0.0, split) + es.integrate(g, split, std::numeric_limits<double>::infinity());
}

// Largest finite moment order, or +inf.
double finite_moment_bound(Family f, double phi) {
  if (f == Family::frechet) return phi;
  if (f == Family::beta_prime) return phi + 2.0;
  return std::numeric_limits<double>::infinity();
}

double bisect_median(const auto& cdf, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void scan_grid(const std::vector<double>& ys, const std::vector<double>& fs, ShapeSummary& s) {
  const auto n = fs.size();
  const auto imax = static_cast<std::size_t>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  const double fmax = fs[imax];
  s.mode = ys[imax];
  const double floor = 1e-8 * fmax;
  s.interior_modes = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (fs[i] > floor && fs[i] > fs[i - 1] && fs[i] >= fs[i + 1] && i > n / 100 && i < n - n / 100) {
      ++s.interior_modes;
    }
  }
  s.decreasing_after_mode = true;
  for (std::size_t i = imax + 1; i < n; ++i) {
    if (fs[i] > fs[i - 1] * (1.0 + 1e-12) && fs[i] > floor) {
      s.decreasing_after_mode = false;
      break;
    }
  }
}

}  // namespace

std::string_view to_string(ShapeKind k) noexcept {
  switch (k) {
    case ShapeKind::symmetric: return "symmetric";
    case ShapeKind::asymmetric: return "asymmetric";
    case ShapeKind::bathtub: return "bathtub";
    case ShapeKind::ramp: return "ramp";
    case ShapeKind::heavy_tail: return "heavy_tail";
    case ShapeKind::thin_tail: return "thin_tail";
  }
  return "?";
}

ShapeKind parse_shape(std::string_view token) {
  for (ShapeKind k : {ShapeKind::symmetric, ShapeKind::asymmetric, ShapeKind::bathtub,
                      ShapeKind::ramp, ShapeKind::heavy_tail, ShapeKind::thin_tail}) {
    if (to_string(k) == token) return k;
  }
  throw ConfigError("unknown shape '" + std::string(token) + "'");
}

Support shape_support(ShapeKind k) noexcept {
  switch (k) {
    case ShapeKind::symmetric:
    case ShapeKind::asymmetric:
    case ShapeKind::bathtub: return Support::unit_interval;
    default: return Support::positive;
  }
}

ShapePreset shape_presets(Family f, ShapeKind kind) {
  for (const auto& e : kPresets) {
    if (e.family == f && e.kind == kind) return {kind, e.location, e.phi};
  }
  throw ConfigError("no '" + std::string(to_string(kind)) + "' preset for family '" +
                    std::string(to_string(f)) + "'");
}

ShapeSummary summarize_shape(Family f, double location, double phi) {
  ShapeSummary s;
  auto pdf = [&](double y) { return density(f, y, location, phi); };
  const Support support = family_support(f);
  if (support == Support::unit_interval) {
    constexpr int kGrid = 4000;
    std::vector<double> ys(kGrid), fs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
      ys[i] = (i + 0.5) / kGrid;
      fs[i] = pdf(ys[i]);
    }
    scan_grid(ys, fs, s);
    const double fmax = *std::max_element(fs.begin(), fs.end());
    double asym = 0.0;
    s.centre_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
      asym = std::max(asym, std::abs(fs[i] - fs[kGrid - 1 - i]));
      if (ys[i] <= 0.25) s.left_max = std::max(s.left_max, fs[i]);
      if (ys[i] >= 0.75) s.right_max = std::max(s.right_max, fs[i]);
      if (ys[i] >= 0.25 && ys[i] <= 0.75) s.centre_min = std::min(s.centre_min, fs[i]);
    }
    s.asymmetry = asym / fmax;
    s.mean = integrate_unit([&](double y) { return y * pdf(y); }, 0.0, 1.0);
    s.median = bisect_median([&](double t) { return integrate_unit(pdf, 0.0, t); }, 0.0, 1.0);
    const double m = s.mean;
    const double var = integrate_unit([&](double y) { return (y - m) * (y - m) * pdf(y); }, 0.0, 1.0);
    const double c4 = integrate_unit([&](double y) { return std::pow(y - m, 4) * pdf(y); }, 0.0, 1.0);
    s.excess_kurtosis = c4 / (var * var) - 3.0;
    return s;
  }
  if (support != Support::positive) {
    throw ConfigError("shape summaries are defined for bounded supports only");
  }
  auto cdf = [&](double t) { return integrate_unit(pdf, 0.0, t); };
  double hi = location;
  while (cdf(hi) < 0.5) hi *= 2.0;
  s.median = bisect_median(cdf, 0.0, hi);
  constexpr int kGrid = 30000;
  std::vector<double> ys(kGrid), fs(kGrid);
  const double upper = 4.0 * s.median;
  for (int i = 0; i < kGrid; ++i) {
    ys[i] = upper * (i + 0.5) / kGrid;
    fs[i] = pdf(ys[i]);
  }
  scan_grid(ys, fs, s);
  s.mean = positive_moment(pdf, 0.0, 1, s.median);
  s.finite_fourth_moment = finite_moment_bound(f, phi) > 4.0;
  if (s.finite_fourth_moment) {
    const double m = s.mean;
    const double var = positive_moment(pdf, m, 2, s.median);
    const double c4 = positive_moment(pdf, m, 4, s.median);
    s.excess_kurtosis = c4 / (var * var) - 3.0;
  } else {
    s.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

bool satisfies_archetype(ShapeKind kind, const ShapeSummary& s) {
  const bool unimodal = s.interior_modes == 1;
  switch (kind) {
    case ShapeKind::symmetric:
      return unimodal && s.asymmetry <= 0.15 && std::abs(s.mean - 0.5) <= 0.02;
    case ShapeKind::asymmetric: return unimodal && std::abs(s.mean - 0.5) >= 0.1;
    case ShapeKind::bathtub:
      return s.left_max >= 2.0 * s.centre_min && s.right_max >= 2.0 * s.centre_min;
    case ShapeKind::ramp: return s.mode <= 0.4 * s.median && s.decreasing_after_mode;
    case ShapeKind::heavy_tail: return !s.finite_fourth_moment || s.excess_kurtosis >= 4.0;
    case ShapeKind::thin_tail:
      return s.finite_fourth_moment && s.excess_kurtosis < 4.0 && s.mode >= 0.6 * s.median;
  }
  return false;
}

}  // namespace glmsim
