#include "glmsim/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "glmsim/error.hpp"
#include "glmsim/format.hpp"
#include "glmsim/rng.hpp"

namespace glmsim {

std::string_view to_string(Effect e) noexcept { return e == Effect::zero ? "zero" : "positive"; }

Effect parse_effect(std::string_view token) {
  if (token == "zero") return Effect::zero;
  if (token == "positive") return Effect::positive;
  throw ConfigError("unknown effect '" + std::string(token) + "'");
}

CoefficientBundle default_coefficients(Effect effect) {
  CoefficientBundle c;
  c.beta_xy = effect == Effect::zero ? 0.0 : kPositiveEffect;
  return c;
}

std::string DgpConfig::descriptor() const {
  std::string s;
  s.append(to_string(family)).append("|").append(to_string(shape)).append("|");
  s.append(to_string(link)).append("|").append(to_string(effect));
  return s;
}

DgpConfig make_dgp_config(Family family, ShapeKind shape, Link link, Effect effect) {
  if (!compatible(family, link) || family == Family::normal) {
    throw ConfigError("link '" + std::string(to_string(link)) +
                      "' cannot generate data for family '" + std::string(to_string(family)) + "'");
  }
  const ShapePreset preset = shape_presets(family, shape);
  DgpConfig c;
  c.family = family;
  c.shape = shape;
  c.link = link;
  c.effect = effect;
  c.coef = default_coefficients(effect);
  c.alpha_y = preset.intercept(link);
  c.phi = preset.phi;
  return c;
}

void validate(const DgpConfig& c) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("invalid DGP config " + c.descriptor() + ": " + what);
  };
  if (!compatible(c.family, c.link)) fail("incompatible family/link");
  if (shape_support(c.shape) != family_support(c.family)) fail("shape does not match support");
  if (c.effect == Effect::zero && c.coef.beta_xy != 0.0) fail("effect=zero requires beta_xy = 0");
  if (c.effect == Effect::positive && !(c.coef.beta_xy > 0.0)) {
    fail("effect=positive requires beta_xy > 0");
  }
  if (!(c.epsilon > 0.0 && c.epsilon < 1e-3)) fail("epsilon must lie in (0, 1e-3)");
  if (c.n_obs < 10) fail("n_obs must be at least 10");
  for (double s : {c.coef.sigma_z1, c.coef.sigma_z2, c.coef.sigma_z3, c.coef.sigma_x, c.coef.sigma_z4}) {
    if (!(s > 0.0) || !std::isfinite(s)) fail("noise scales must be positive");
  }
  if (!valid_shape(c.family, c.phi)) fail("invalid phi");
  if (!std::isfinite(c.alpha_y)) fail("non-finite alpha_y");
}

Dataset generate(const DgpConfig& config, std::uint64_t seed) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.n_obs);
  const CoefficientBundle& b = config.coef;
  Rng rng(seed);
  Dataset d;
  d.config = config;
  d.seed = seed;
  d.z1.resize(n);
  d.z2.resize(n);
  d.z3.resize(n);
  d.x.resize(n);
  d.y.resize(n);
  d.z4.resize(n);
  for (auto& v : d.z1) v = rng.normal(0.0, b.sigma_z1);
  for (auto& v : d.z2) v = rng.normal(0.0, b.sigma_z2);
  for (auto& v : d.z3) v = rng.normal(0.0, b.sigma_z3);
  for (std::size_t i = 0; i < n; ++i) {
    d.x[i] = rng.normal(b.beta_z1x * d.z1[i] + b.beta_z3x * d.z3[i], b.sigma_x);
  }
  const Support support = family_support(config.family);
  const double eps = config.epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta =
        config.alpha_y + b.beta_xy * d.x[i] + b.beta_z1y * d.z1[i] + b.beta_z2y * d.z2[i];
    double y;
    try {
      y = sample_closed(config.family, location_of(config.family, eta, config.link), config.phi, rng);
    } catch (const std::exception& e) {
      throw GenerationError("row " + std::to_string(i) + " of " + config.descriptor() + ": " +
                            e.what());
    }
    if (support == Support::unit_interval) {
      y = std::clamp(y, eps, 1.0 - eps);
    } else if (support == Support::positive) {
      y = std::max(y, eps);
    }
    d.y[i] = y;
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.z4[i] = rng.normal(b.beta_xz4 * d.x[i] + b.beta_yz4 * d.y[i], b.sigma_z4);
  }
  return d;
}

std::uint64_t content_hash(const Dataset& data) {
  std::ostringstream os;
  write_csv(os, data);
  const std::string s = os.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_csv(std::ostream& os, const Dataset& d) {
  os << "y,x,z1,z2,z3,z4\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << format_double(d.y[i]) << ',' << format_double(d.x[i]) << ',' << format_double(d.z1[i])
       << ',' << format_double(d.z2[i]) << ',' << format_double(d.z3[i]) << ','
       << format_double(d.z4[i]) << '\n';
  }
}

Dataset read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "y,x,z1,z2,z3,z4") {
    throw DataError("dataset CSV: missing header 'y,x,z1,z2,z3,z4'");
  }
  Dataset d;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++row;
    std::istringstream ls(line);
    std::string cell;
    double v[6];
    for (int k = 0; k < 6; ++k) {
      if (!std::getline(ls, cell, ',')) {
        throw DataError("dataset CSV: row " + std::to_string(row) + " has fewer than 6 columns");
      }
      v[k] = parse_double(cell);
    }
    d.y.push_back(v[0]);
    d.x.push_back(v[1]);
    d.z1.push_back(v[2]);
    d.z2.push_back(v[3]);
    d.z3.push_back(v[4]);
    d.z4.push_back(v[5]);
  }
  return d;
}

void to_json(nlohmann::json& j, const DgpConfig& c) {
  const auto& b = c.coef;
  j = nlohmann::json{{"family", to_string(c.family)},
                     {"shape", to_string(c.shape)},
                     {"link", to_string(c.link)},
                     {"effect", to_string(c.effect)},
                     {"beta_xy", b.beta_xy},
                     {"beta_z1x", b.beta_z1x},
                     {"beta_z3x", b.beta_z3x},
                     {"beta_z1y", b.beta_z1y},
                     {"beta_z2y", b.beta_z2y},
                     {"beta_xz4", b.beta_xz4},
                     {"beta_yz4", b.beta_yz4},
                     {"sigma_z1", b.sigma_z1},
                     {"sigma_z2", b.sigma_z2},
                     {"sigma_z3", b.sigma_z3},
                     {"sigma_x", b.sigma_x},
                     {"sigma_z4", b.sigma_z4},
                     {"alpha_y", c.alpha_y},
                     {"phi", c.phi},
                     {"n_obs", c.n_obs},
                     {"epsilon", c.epsilon}};
}

void from_json(const nlohmann::json& j, DgpConfig& c) {
  c.family = parse_family(j.at("family").get<std::string>());
  c.shape = parse_shape(j.at("shape").get<std::string>());
  c.link = parse_link(j.at("link").get<std::string>());
  c.effect = parse_effect(j.at("effect").get<std::string>());
  auto& b = c.coef;
  j.at("beta_xy").get_to(b.beta_xy);
  j.at("beta_z1x").get_to(b.beta_z1x);
  j.at("beta_z3x").get_to(b.beta_z3x);
  j.at("beta_z1y").get_to(b.beta_z1y);
  j.at("beta_z2y").get_to(b.beta_z2y);
  j.at("beta_xz4").get_to(b.beta_xz4);
  j.at("beta_yz4").get_to(b.beta_yz4);
  j.at("sigma_z1").get_to(b.sigma_z1);
  j.at("sigma_z2").get_to(b.sigma_z2);
  j.at("sigma_z3").get_to(b.sigma_z3);
  j.at("sigma_x").get_to(b.sigma_x);
  j.at("sigma_z4").get_to(b.sigma_z4);
  j.at("alpha_y").get_to(c.alpha_y);
  j.at("phi").get_to(c.phi);
  j.at("n_obs").get_to(c.n_obs);
  j.at("epsilon").get_to(c.epsilon);
}

nlohmann::json dataset_metadata(const Dataset& data) {
  return nlohmann::json{{"config", data.config}, {"seed", data.seed}};
}

}  // namespace glmsim
