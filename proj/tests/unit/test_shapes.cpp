#include <doctest.h>

#include "glmsim/error.hpp"
#include "glmsim/shapes.hpp"

using namespace glmsim;

TEST_CASE("every shipped preset satisfies its archetype") {
  int checked = 0;
  for (Family f : kAllFamilies) {
    if (f == Family::normal) continue;
    const bool unit = family_support(f) == Support::unit_interval;
    for (ShapeKind k : unit ? kUnitShapes : kPositiveShapes) {
      const ShapePreset p = shape_presets(f, k);
      CAPTURE(to_string(f));
      CAPTURE(to_string(k));
      CHECK(p.kind == k);
      CHECK(valid_shape(f, p.phi));
      CHECK(satisfies_archetype(k, summarize_shape(f, p.location, p.phi)));
      ++checked;
    }
  }
  CHECK(checked == 39);
}

TEST_CASE("predicates reject the wrong archetype") {
  const auto sym = summarize_shape(Family::beta, 0.5, 10);
  CHECK_FALSE(satisfies_archetype(ShapeKind::bathtub, sym));
  CHECK_FALSE(satisfies_archetype(ShapeKind::asymmetric, sym));
  const auto tub = summarize_shape(Family::beta, 0.5, 1.5);
  CHECK_FALSE(satisfies_archetype(ShapeKind::symmetric, tub));
  const auto thin = summarize_shape(Family::gamma, 1, 10);
  CHECK_FALSE(satisfies_archetype(ShapeKind::ramp, thin));
  CHECK_FALSE(satisfies_archetype(ShapeKind::heavy_tail, thin));
}

TEST_CASE("beta and gamma presets meet the analytic conditions") {
  const auto tub = shape_presets(Family::beta, ShapeKind::bathtub);
  CHECK(tub.location * tub.phi < 1.0);
  CHECK((1 - tub.location) * tub.phi < 1.0);
  const auto sym = shape_presets(Family::beta, ShapeKind::symmetric);
  CHECK(sym.location == 0.5);
  CHECK(sym.phi > 2.0);
  CHECK(shape_presets(Family::gamma, ShapeKind::ramp).phi <= 1.0);
}

TEST_CASE("unsupported combinations") {
  CHECK_THROWS_AS(shape_presets(Family::gamma, ShapeKind::bathtub), ConfigError);
  CHECK_THROWS_AS(shape_presets(Family::beta, ShapeKind::ramp), ConfigError);
  CHECK_THROWS_AS(shape_presets(Family::normal, ShapeKind::symmetric), ConfigError);
  CHECK_THROWS_AS(parse_shape("uniform"), ConfigError);
}

TEST_CASE("preset intercept follows the link") {
  const auto p = shape_presets(Family::beta, ShapeKind::asymmetric);
  CHECK(p.intercept(Link::logit) == doctest::Approx(apply_link(Link::logit, p.location)));
  CHECK(p.intercept(Link::cloglog) == doctest::Approx(apply_link(Link::cloglog, p.location)));
  for (ShapeKind k : kPositiveShapes) CHECK(parse_shape(to_string(k)) == k);
}
