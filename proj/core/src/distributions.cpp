#include "glmsim/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "glmsim/error.hpp"

namespace glmsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
constexpr int kMaxSampleRetries = 100;

// Double-precision evaluation; the default policy promotes to long double, which
// dominates fitting time. Overflow yields inf rather than throwing: callers are noexcept
// and treat non-finite densities as rejections.
using FastPolicy = boost::math::policies::policy<
    boost::math::policies::promote_double<false>,
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::pole_error<boost::math::policies::ignore_error>,
    boost::math::policies::domain_error<boost::math::policies::ignore_error>>;

double lgam(double x) { return boost::math::lgamma(x, FastPolicy()); }

double lbeta(double a, double b) { return lgam(a) + lgam(b) - lgam(a + b); }

bool in_support(Support s, double y) noexcept {
  switch (s) {
    case Support::unit_interval: return y > 0.0 && y < 1.0;
    case Support::positive: return y > 0.0 && std::isfinite(y);
    case Support::real: return std::isfinite(y);
  }
  return false;
}

double normal_lpdf(double z, double m, double sd) noexcept {
  const double r = (z - m) / sd;
  return -0.5 * kLogTwoPi - std::log(sd) - 0.5 * r * r;
}

// Kumaraswamy b for median mu and a = phi: 1 - (1 - mu^a)^b = 1/2.
double kumaraswamy_b(double mu, double a) noexcept {
  return -std::numbers::ln2 / std::log1p(-std::pow(mu, a));
}

// Gompertz rate b with F(y) = 1 - exp(-phi (e^{b y} - 1)) and median mu.
double gompertz_rate(double mu, double phi) noexcept {
  return std::log1p(std::numbers::ln2 / phi) / mu;
}

std::string context(Family f, double y, double mu, double phi) {
  std::ostringstream os;
  os.precision(17);
  os << "family '" << to_string(f) << "' (y=" << y << ", mu=" << mu << ", phi=" << phi << ")";
  return os.str();
}

}  // namespace

Support family_support(Family f) noexcept {
  switch (f) {
    case Family::beta:
    case Family::kumaraswamy:
    case Family::simplex:
    case Family::logit_normal:
    case Family::cauchit_normal:
    case Family::cloglog_normal: return Support::unit_interval;
    case Family::gamma:
    case Family::weibull:
    case Family::frechet:
    case Family::beta_prime:
    case Family::gompertz:
    case Family::log_normal:
    case Family::softplus_normal: return Support::positive;
    case Family::normal: return Support::real;
  }
  return Support::real;
}

LocationKind location_kind(Family f) noexcept {
  switch (f) {
    case Family::kumaraswamy:
    case Family::gompertz:
    case Family::logit_normal:
    case Family::cauchit_normal:
    case Family::cloglog_normal:
    case Family::log_normal:
    case Family::softplus_normal: return LocationKind::median;
    default: return LocationKind::mean;
  }
}

Stability stability(Family f) noexcept {
  return (f == Family::frechet || f == Family::gompertz) ? Stability::fragile
                                                         : Stability::stable;
}

std::optional<Link> response_transform(Family f) noexcept {
  switch (f) {
    case Family::logit_normal: return Link::logit;
    case Family::cauchit_normal: return Link::cauchit;
    case Family::cloglog_normal: return Link::cloglog;
    case Family::log_normal: return Link::log;
    case Family::softplus_normal: return Link::softplus;
    default: return std::nullopt;
  }
}

std::optional<Family> transformed_normal_for(Link link) noexcept {
  switch (link) {
    case Link::logit: return Family::logit_normal;
    case Link::cauchit: return Family::cauchit_normal;
    case Link::cloglog: return Family::cloglog_normal;
    case Link::log: return Family::log_normal;
    case Link::softplus: return Family::softplus_normal;
    case Link::identity: return std::nullopt;
  }
  return std::nullopt;
}

bool compatible(Family f, Link link) noexcept {
  if (f == Family::normal) return true;
  return link_domain(link) == family_support(f);
}

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::beta: return "beta";
    case Family::kumaraswamy: return "kumaraswamy";
    case Family::simplex: return "simplex";
    case Family::logit_normal: return "logit_normal";
    case Family::cauchit_normal: return "cauchit_normal";
    case Family::cloglog_normal: return "cloglog_normal";
    case Family::gamma: return "gamma";
    case Family::weibull: return "weibull";
    case Family::frechet: return "frechet";
    case Family::beta_prime: return "beta_prime";
    case Family::gompertz: return "gompertz";
    case Family::log_normal: return "log_normal";
    case Family::softplus_normal: return "softplus_normal";
    case Family::normal: return "normal";
  }
  return "?";
}

Family parse_family(std::string_view token) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == token) return f;
  }
  throw ConfigError("unknown family '" + std::string(token) + "'");
}

bool valid_shape(Family f, double phi) noexcept {
  if (!(phi > 0.0) || !std::isfinite(phi)) return false;
  if (f == Family::frechet) return phi > 1.0;
  return true;
}

namespace detail {

double log_density_unchecked(Family f, double y, double mu, double phi) noexcept {
  switch (f) {
    case Family::beta: {
      const double a = mu * phi;
      const double b = (1.0 - mu) * phi;
      return (a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y) - lbeta(a, b);
    }
    case Family::kumaraswamy: {
      const double a = phi;
      const double b = kumaraswamy_b(mu, a);
      const double log_y = std::log(y);
      return std::log(a) + std::log(b) + (a - 1.0) * log_y +
             (b - 1.0) * std::log1p(-std::exp(a * log_y));
    }
    case Family::simplex: {
      const double yy = y * (1.0 - y);
      const double mm = mu * (1.0 - mu);
      const double dev = (y - mu) * (y - mu) / (yy * mm * mm);
      return -0.5 * kLogTwoPi - std::log(phi) - 1.5 * (std::log(y) + std::log1p(-y)) -
             dev / (2.0 * phi * phi);
    }
    case Family::logit_normal:
    case Family::cauchit_normal:
    case Family::cloglog_normal:
    case Family::log_normal:
    case Family::softplus_normal: {
      const Link t = *response_transform(f);
      const double z = link_unchecked(t, y);
      const double m = link_unchecked(t, mu);
      return normal_lpdf(z, m, phi) - log_inv_link_deriv_unchecked(t, z);
    }
    case Family::normal: return normal_lpdf(y, mu, phi);
    case Family::gamma: {
      const double rate = phi / mu;
      return phi * std::log(rate) - lgam(phi) + (phi - 1.0) * std::log(y) - rate * y;
    }
    case Family::weibull: {
      const double log_scale = std::log(mu) - lgam(1.0 + 1.0 / phi);
      const double lz = std::log(y) - log_scale;
      return std::log(phi) - log_scale + (phi - 1.0) * lz - std::exp(phi * lz);
    }
    case Family::frechet: {
      if (!(phi > 1.0)) return kNaN;
      const double log_scale = std::log(mu) - lgam(1.0 - 1.0 / phi);
      const double lz = std::log(y) - log_scale;
      return std::log(phi) - log_scale - (1.0 + phi) * lz - std::exp(-phi * lz);
    }
    case Family::beta_prime: {
      const double a = mu * (phi + 1.0);
      const double b = phi + 2.0;
      return (a - 1.0) * std::log(y) - (a + b) * std::log1p(y) - lbeta(a, b);
    }
    case Family::gompertz: {
      const double b = gompertz_rate(mu, phi);
      const double by = b * y;
      return std::log(b) + std::log(phi) + by - phi * std::expm1(by);
    }
  }
  return kNaN;
}

double sample_unchecked(Family f, double mu, double phi, Rng& rng) {
  switch (f) {
    case Family::beta: {
      // Ratio in log space: both gamma draws can underflow when mu is near a bound.
      const double l1 = rng.log_gamma(mu * phi);
      const double l2 = rng.log_gamma((1.0 - mu) * phi);
      return 1.0 / (1.0 + std::exp(l2 - l1));
    }
    case Family::kumaraswamy: {
      const double a = phi;
      const double b = kumaraswamy_b(mu, a);
      // 1 - (1 - u)^(1/b), then the 1/a root.
      const double w = -std::expm1(std::log(rng.uniform()) / b);
      return std::exp(std::log(w) / a);
    }
    case Family::simplex: {
      // y = x / (1 + x) where x mixes IG(m, lambda) (weight 1 - mu) with its
      // length-biased version IG + (m^2 / lambda) chi2_1 (weight mu).
      const double m = mu / (1.0 - mu);
      const double lambda = (1.0 + m) * (1.0 + m) / (phi * phi);
      const double n = rng.normal();
      const double w = m * n * n / lambda;
      double x = m / (1.0 + 0.5 * w + std::sqrt(w + 0.25 * w * w));
      if (rng.uniform() > m / (m + x)) x = m * m / x;
      if (rng.uniform() < mu) {
        const double n2 = rng.normal();
        x += m * m / lambda * n2 * n2;
      }
      return x / (1.0 + x);
    }
    case Family::logit_normal:
    case Family::cauchit_normal:
    case Family::cloglog_normal:
    case Family::log_normal:
    case Family::softplus_normal: {
      const Link t = *response_transform(f);
      return inv_link_unchecked(t, rng.normal(link_unchecked(t, mu), phi));
    }
    case Family::normal: return rng.normal(mu, phi);
    case Family::gamma: return rng.gamma(phi) * mu / phi;
    case Family::weibull: {
      const double scale = mu / std::exp(lgam(1.0 + 1.0 / phi));
      return scale * std::pow(-std::log(rng.uniform()), 1.0 / phi);
    }
    case Family::frechet: {
      const double scale = mu / std::exp(lgam(1.0 - 1.0 / phi));
      return scale * std::pow(-std::log(rng.uniform()), -1.0 / phi);
    }
    case Family::beta_prime: {
      const double g1 = rng.gamma(mu * (phi + 1.0));
      const double g2 = rng.gamma(phi + 2.0);
      return g1 / g2;
    }
    case Family::gompertz: {
      const double b = gompertz_rate(mu, phi);
      return std::log1p(-std::log(rng.uniform()) / phi) / b;
    }
  }
  return kNaN;
}

}  // namespace detail

namespace {

void check_params(Family f, double mu, double phi) {
  const Support s = family_support(f);
  if (!in_support(s, mu)) {
    throw DomainError(context(f, kNaN, mu, phi) + ": location outside support");
  }
  if (!valid_shape(f, phi)) {
    throw DomainError(context(f, kNaN, mu, phi) + ": invalid shape parameter");
  }
}

}  // namespace

double log_density(Family f, double y, double mu, double phi) {
  if (!in_support(family_support(f), y)) {
    throw DomainError(context(f, y, mu, phi) + ": y outside support");
  }
  check_params(f, mu, phi);
  const double lp = detail::log_density_unchecked(f, y, mu, phi);
  if (!std::isfinite(lp)) {
    throw EvaluationError(context(f, y, mu, phi) + ": non-finite log density");
  }
  return lp;
}

double sample(Family f, double mu, double phi, Rng& rng) {
  check_params(f, mu, phi);
  const Support s = family_support(f);
  for (int i = 0; i < kMaxSampleRetries; ++i) {
    const double y = detail::sample_unchecked(f, mu, phi, rng);
    if (in_support(s, y)) return y;
  }
  throw EvaluationError(context(f, kNaN, mu, phi) + ": sampler failed to produce an interior draw");
}

double sample_closed(Family f, double mu, double phi, Rng& rng) {
  check_params(f, mu, phi);
  for (int i = 0; i < kMaxSampleRetries; ++i) {
    const double y = detail::sample_unchecked(f, mu, phi, rng);
    if (!std::isnan(y)) return y;
  }
  throw EvaluationError(context(f, kNaN, mu, phi) + ": sampler produced no valid draw");
}

double location_of(Family f, double eta, Link link) {
  if (!compatible(f, link)) {
    throw ConfigError("link '" + std::string(to_string(link)) + "' is incompatible with family '" +
                      std::string(to_string(f)) + "'");
  }
  return apply_inv_link(link, eta);
}

}  // namespace glmsim
