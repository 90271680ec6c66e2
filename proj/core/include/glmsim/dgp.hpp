#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "glmsim/distributions.hpp"
#include "glmsim/links.hpp"
#include "glmsim/shapes.hpp"

namespace glmsim {

enum class Effect { zero, positive };

std::string_view to_string(Effect e) noexcept;
Effect parse_effect(std::string_view token);

// Coefficients and noise scales of the data-generating DAG:
//   z1, z2, z3 ~ normal(0, sigma)
//   x  ~ normal(b_z1x z1 + b_z3x z3, sigma_x)
//   y  ~ family(inv_link(alpha_y + b_xy x + b_z1y z1 + b_z2y z2), phi)
//   z4 ~ normal(b_xz4 x + b_yz4 y, sigma_z4)
struct CoefficientBundle {
  double beta_xy = 0.0;
  double beta_z1x = 0.5;
  double beta_z3x = 0.5;
  double beta_z1y = 0.5;
  double beta_z2y = 0.5;
  double beta_xz4 = 0.5;
  double beta_yz4 = 0.5;
  double sigma_z1 = 1.0;
  double sigma_z2 = 1.0;
  double sigma_z3 = 1.0;
  double sigma_x = 1.0;
  double sigma_z4 = 1.0;
};

// Treatment effect used for effect=positive. Smallest value on the pilot grid
// {0.1, 0.2, ..., 1.0} whose 95% Wald TPR for the ideal beta+logit model on
// symmetric beta+logit data lies in (0.2, 0.9) at n = 100.
inline constexpr double kPositiveEffect = 0.1;

CoefficientBundle default_coefficients(Effect effect);

struct DgpConfig {
  Family family = Family::beta;
  ShapeKind shape = ShapeKind::symmetric;
  Link link = Link::logit;
  Effect effect = Effect::zero;
  CoefficientBundle coef;
  double alpha_y = 0.0;
  double phi = 1.0;
  int n_obs = 100;
  double epsilon = 1e-6;

  // "family|shape|link|effect"; stable identifier for seeding and provenance.
  std::string descriptor() const;
};

// Config with the shipped coefficients and the (alpha_y, phi) preset for the shape.
DgpConfig make_dgp_config(Family family, ShapeKind shape, Link link, Effect effect);

// Throws ConfigError when an invariant is violated.
void validate(const DgpConfig& config);

struct Dataset {
  std::vector<double> y, x, z1, z2, z3, z4;
  DgpConfig config;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return y.size(); }
};

// Columns are drawn in topological order z1, z2, z3, x, y, z4; y is clamped to
// [eps, 1 - eps] (unit interval) or [eps, inf) (positive). Deterministic in (config, seed).
Dataset generate(const DgpConfig& config, std::uint64_t seed);

// FNV-1a over the 17-significant-digit decimal rendering of every column.
std::uint64_t content_hash(const Dataset& data);

// CSV with header y,x,z1,z2,z3,z4; values printed with 17 significant digits.
void write_csv(std::ostream& os, const Dataset& data);
// Reads the columns written by write_csv; config/seed are left default.
Dataset read_csv(std::istream& is);

void to_json(nlohmann::json& j, const DgpConfig& c);
void from_json(const nlohmann::json& j, DgpConfig& c);

// Sidecar metadata record: {"config": ..., "seed": ...}.
nlohmann::json dataset_metadata(const Dataset& data);

}  // namespace glmsim
