#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "glmsim/links.hpp"
#include "glmsim/rng.hpp"

namespace glmsim {

enum class Family {
  beta,
  kumaraswamy,
  simplex,
  logit_normal,
  cauchit_normal,
  cloglog_normal,
  gamma,
  weibull,
  frechet,
  beta_prime,
  gompertz,
  log_normal,
  softplus_normal,
  normal,
};

inline constexpr std::array<Family, 14> kAllFamilies = {
    Family::beta,       Family::kumaraswamy, Family::simplex,     Family::logit_normal,
    Family::cauchit_normal, Family::cloglog_normal, Family::gamma, Family::weibull,
    Family::frechet,    Family::beta_prime,  Family::gompertz,    Family::log_normal,
    Family::softplus_normal, Family::normal};

enum class LocationKind { mean, median };

// Families whose fits fail disproportionately often; reported separately by the harness.
enum class Stability { stable, fragile };

Support family_support(Family f) noexcept;
LocationKind location_kind(Family f) noexcept;
Stability stability(Family f) noexcept;

// For the transformed-normal families, the link applied to the response.
std::optional<Link> response_transform(Family f) noexcept;

// The transformed-normal family built from `link`, if one exists.
std::optional<Family> transformed_normal_for(Link link) noexcept;

// Whether `link` can drive the location of `f`: the link's domain must equal the
// family's support, except for the normal family which accepts every link.
bool compatible(Family f, Link link) noexcept;

std::string_view to_string(Family f) noexcept;
Family parse_family(std::string_view token);

// Whether phi is an admissible shape value (positive and finite; > 1 for frechet).
bool valid_shape(Family f, double phi) noexcept;

// Log density of y under the location/shape parameterization of `f`.
// Throws DomainError on support or parameter violations and EvaluationError if the
// result is not finite.
double log_density(Family f, double y, double mu, double phi);

// One draw strictly inside the support. Throws like log_density.
double sample(Family f, double mu, double phi, Rng& rng);

// One draw from the closed support: draws that round onto a bound are returned as is,
// for callers that truncate afterwards.
double sample_closed(Family f, double mu, double phi, Rng& rng);

// Location parameter of `f` for linear predictor eta under `link`.
// Throws ConfigError for an incompatible pair and InputError for non-finite eta.
double location_of(Family f, double eta, Link link);

namespace detail {
// Unchecked log density. Returns NaN or -inf outside the valid region.
double log_density_unchecked(Family f, double y, double mu, double phi) noexcept;
// Unchecked draw, may land on a boundary after rounding.
double sample_unchecked(Family f, double mu, double phi, Rng& rng);
}  // namespace detail

}  // namespace glmsim
