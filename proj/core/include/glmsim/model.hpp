#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "glmsim/dgp.hpp"
#include "glmsim/distributions.hpp"
#include "glmsim/links.hpp"

namespace glmsim {

// Right-hand sides that leave the x -> y effect asymptotically unbiased.
enum class Formula {
  ideal,       // x + z1 + z2
  omit_z2,     // x + z1
  include_z3,  // x + z1 + z2 + z3
};

inline constexpr std::array<Formula, 3> kAllFormulas = {Formula::ideal, Formula::omit_z2,
                                                        Formula::include_z3};

std::string_view to_string(Formula f) noexcept;
// Accepts "x+z1+z2" style tokens as well as ideal/omit_z2/include_z3.
Formula parse_formula(std::string_view token);

struct ModelSpec {
  Family family = Family::beta;
  Link link = Link::logit;
  Formula formula = Formula::ideal;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Throws ConfigError if the link cannot drive the family's location.
void validate(const ModelSpec& spec);

std::string describe(const ModelSpec& spec);

// Number of regression coefficients including the intercept.
int num_coefficients(Formula f) noexcept;
// Regression coefficients plus log(phi).
inline int num_parameters(Formula f) noexcept { return num_coefficients(f) + 1; }

// Parameter order: intercept, x, z1, [z2], [z3], log_phi.
std::vector<std::string> parameter_names(Formula f);

inline constexpr int kTreatmentIndex = 1;

// Design matrix with an intercept column followed by the formula's predictors.
Eigen::MatrixXd design_matrix(Formula f, const Dataset& data);

}  // namespace glmsim
