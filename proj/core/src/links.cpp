#include "glmsim/links.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "glmsim/error.hpp"

namespace glmsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double eta) noexcept {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double softplus(double eta) noexcept {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

bool in_domain(Support s, double mu) noexcept {
  switch (s) {
    case Support::unit_interval: return mu > 0.0 && mu < 1.0;
    case Support::positive: return mu > 0.0 && std::isfinite(mu);
    case Support::real: return std::isfinite(mu);
  }
  return false;
}

double clamp_to_domain(Support s, double mu) noexcept {
  switch (s) {
    case Support::unit_interval:
      if (mu < kLinkGuard) return kLinkGuard;
      if (mu > 1.0 - kLinkGuard) return 1.0 - kLinkGuard;
      return mu;
    case Support::positive: return mu < kLinkGuard ? kLinkGuard : mu;
    case Support::real: return mu;
  }
  return mu;
}

}  // namespace

Support link_domain(Link link) noexcept {
  switch (link) {
    case Link::logit:
    case Link::cauchit:
    case Link::cloglog: return Support::unit_interval;
    case Link::log:
    case Link::softplus: return Support::positive;
    case Link::identity: return Support::real;
  }
  return Support::real;
}

std::string_view to_string(Link link) noexcept {
  switch (link) {
    case Link::logit: return "logit";
    case Link::cauchit: return "cauchit";
    case Link::cloglog: return "cloglog";
    case Link::log: return "log";
    case Link::softplus: return "softplus";
    case Link::identity: return "identity";
  }
  return "?";
}

std::string_view to_string(Support support) noexcept {
  switch (support) {
    case Support::unit_interval: return "unit";
    case Support::positive: return "positive";
    case Support::real: return "real";
  }
  return "?";
}

Link parse_link(std::string_view token) {
  for (Link l : kAllLinks) {
    if (to_string(l) == token) return l;
  }
  throw ConfigError("unknown link '" + std::string(token) + "'");
}

namespace detail {

double link_unchecked(Link link, double mu) noexcept {
  switch (link) {
    case Link::logit: return std::log(mu) - std::log1p(-mu);
    case Link::cauchit: return std::tan(std::numbers::pi * (mu - 0.5));
    case Link::cloglog: return std::log(-std::log1p(-mu));
    case Link::log: return std::log(mu);
    case Link::softplus:
      // log(exp(mu) - 1) = mu + log(1 - exp(-mu))
      return mu > 1.0 ? mu + std::log(-std::expm1(-mu)) : std::log(std::expm1(mu));
    case Link::identity: return mu;
  }
  return kNaN;
}

double inv_link_unchecked(Link link, double eta) noexcept {
  double mu = kNaN;
  switch (link) {
    case Link::logit: mu = logistic(eta); break;
    case Link::cauchit: mu = std::atan(eta) / std::numbers::pi + 0.5; break;
    case Link::cloglog: mu = -std::expm1(-std::exp(eta)); break;
    case Link::log: mu = std::exp(eta); break;
    case Link::softplus: mu = softplus(eta); break;
    case Link::identity: return eta;
  }
  return clamp_to_domain(link_domain(link), mu);
}

double inv_link_deriv_unchecked(Link link, double eta) noexcept {
  switch (link) {
    case Link::logit: {
      const double p = logistic(eta);
      return p * (1.0 - p);
    }
    case Link::cauchit: return 1.0 / (std::numbers::pi * (1.0 + eta * eta));
    case Link::cloglog: return std::exp(eta - std::exp(eta));
    case Link::log: return std::exp(eta);
    case Link::softplus: return logistic(eta);
    case Link::identity: return 1.0;
  }
  return kNaN;
}

double log_inv_link_deriv_unchecked(Link link, double eta) noexcept {
  switch (link) {
    case Link::logit: return -softplus(eta) - softplus(-eta);
    case Link::cauchit: return -std::log(std::numbers::pi) - std::log1p(eta * eta);
    case Link::cloglog: return eta - std::exp(eta);
    case Link::log: return eta;
    case Link::softplus: return -softplus(-eta);
    case Link::identity: return 0.0;
  }
  return kNaN;
}

}  // namespace detail

double apply_link(Link link, double mu) {
  if (!in_domain(link_domain(link), mu)) {
    std::ostringstream os;
    os.precision(17);
    os << "link '" << to_string(link) << "': mu=" << mu << " outside domain "
       << to_string(link_domain(link));
    throw DomainError(os.str());
  }
  return detail::link_unchecked(link, mu);
}

double apply_inv_link(Link link, double eta) {
  if (!std::isfinite(eta)) {
    throw InputError("inverse link '" + std::string(to_string(link)) + "': non-finite eta");
  }
  return detail::inv_link_unchecked(link, eta);
}

double inv_link_deriv(Link link, double eta) {
  if (!std::isfinite(eta)) {
    throw InputError("inverse link derivative '" + std::string(to_string(link)) +
                     "': non-finite eta");
  }
  return detail::inv_link_deriv_unchecked(link, eta);
}

}  // namespace glmsim
