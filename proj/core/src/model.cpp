#include "glmsim/model.hpp"

#include "glmsim/error.hpp"

namespace glmsim {

std::string_view to_string(Formula f) noexcept {
  switch (f) {
    case Formula::ideal: return "x+z1+z2";
    case Formula::omit_z2: return "x+z1";
    case Formula::include_z3: return "x+z1+z2+z3";
  }
  return "?";
}

Formula parse_formula(std::string_view token) {
  if (token == "x+z1+z2" || token == "ideal") return Formula::ideal;
  if (token == "x+z1" || token == "omit_z2") return Formula::omit_z2;
  if (token == "x+z1+z2+z3" || token == "include_z3") return Formula::include_z3;
  throw ConfigError("unknown formula '" + std::string(token) + "'");
}

void validate(const ModelSpec& spec) {
  if (!compatible(spec.family, spec.link)) {
    throw ConfigError("model " + describe(spec) + ": link incompatible with family support");
  }
}

std::string describe(const ModelSpec& spec) {
  std::string s(to_string(spec.family));
  s.append("+").append(to_string(spec.link)).append(" ~ ").append(to_string(spec.formula));
  return s;
}

int num_coefficients(Formula f) noexcept {
  switch (f) {
    case Formula::ideal: return 4;
    case Formula::omit_z2: return 3;
    case Formula::include_z3: return 5;
  }
  return 0;
}

std::vector<std::string> parameter_names(Formula f) {
  std::vector<std::string> names = {"intercept", "x", "z1"};
  if (f != Formula::omit_z2) names.emplace_back("z2");
  if (f == Formula::include_z3) names.emplace_back("z3");
  names.emplace_back("log_phi");
  return names;
}

Eigen::MatrixXd design_matrix(Formula f, const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd X(n, num_coefficients(f));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    X(i, 0) = 1.0;
    X(i, 1) = data.x[r];
    X(i, 2) = data.z1[r];
    if (f != Formula::omit_z2) X(i, 3) = data.z2[r];
    if (f == Formula::include_z3) X(i, 4) = data.z3[r];
  }
  return X;
}

}  // namespace glmsim
