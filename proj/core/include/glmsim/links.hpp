#pragma once

#include <array>
#include <string>
#include <string_view>

namespace glmsim {

enum class Support { unit_interval, positive, real };

enum class Link { logit, cauchit, cloglog, log, softplus, identity };

inline constexpr std::array<Link, 6> kAllLinks = {Link::logit, Link::cauchit, Link::cloglog,
                                                  Link::log,   Link::softplus, Link::identity};

// Guard used when clamping inverse-link output away from domain boundaries.
inline constexpr double kLinkGuard = 1e-12;

Support link_domain(Link link) noexcept;

std::string_view to_string(Link link) noexcept;
std::string_view to_string(Support support) noexcept;

// Throws ConfigError for an unknown token.
Link parse_link(std::string_view token);

// link(mu). Throws DomainError if mu is not strictly inside the link's domain.
double apply_link(Link link, double mu);

// inv_link(eta), clamped to [kLinkGuard, 1 - kLinkGuard] on the unit interval and to
// [kLinkGuard, inf) on the positive half-line. Throws InputError for non-finite eta.
double apply_inv_link(Link link, double eta);

// d inv_link / d eta. Throws InputError for non-finite eta.
double inv_link_deriv(Link link, double eta);

namespace detail {
// Unchecked variants for hot loops. Return NaN instead of throwing.
double link_unchecked(Link link, double mu) noexcept;
double inv_link_unchecked(Link link, double eta) noexcept;
double inv_link_deriv_unchecked(Link link, double eta) noexcept;
// log(d inv_link / d eta), evaluated without underflow in the tails.
double log_inv_link_deriv_unchecked(Link link, double eta) noexcept;
}  // namespace detail

}  // namespace glmsim
