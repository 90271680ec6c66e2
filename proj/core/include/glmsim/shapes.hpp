#pragma once

#include <array>
#include <string_view>

#include "glmsim/distributions.hpp"
#include "glmsim/links.hpp"

namespace glmsim {

// Unit-interval archetypes: symmetric, asymmetric, bathtub.
// Positive-support archetypes: ramp, heavy_tail, thin_tail.
enum class ShapeKind { symmetric, asymmetric, bathtub, ramp, heavy_tail, thin_tail };

inline constexpr std::array<ShapeKind, 3> kUnitShapes = {ShapeKind::symmetric,
                                                         ShapeKind::asymmetric, ShapeKind::bathtub};
inline constexpr std::array<ShapeKind, 3> kPositiveShapes = {
    ShapeKind::ramp, ShapeKind::heavy_tail, ShapeKind::thin_tail};

std::string_view to_string(ShapeKind k) noexcept;
ShapeKind parse_shape(std::string_view token);
Support shape_support(ShapeKind k) noexcept;

// Preset for one family x archetype. The preset fixes the location at the centre of
// the predictors (all predictors have mean zero), so the DGP intercept is
// link(location) for whichever link generates the data.
struct ShapePreset {
  ShapeKind kind;
  double location;
  double phi;

  double intercept(Link link) const { return apply_link(link, location); }
};

// Throws ConfigError for combinations without a preset (e.g. bathtub for gamma,
// anything for the normal family).
ShapePreset shape_presets(Family f, ShapeKind kind);

// Numerical summary of a density used by the archetype predicates.
struct ShapeSummary {
  double mean = 0.0;
  double median = 0.0;
  double mode = 0.0;
  int interior_modes = 0;        // strict local maxima away from the grid ends
  double asymmetry = 0.0;        // max |f(y) - f(1-y)| / max f (unit interval only)
  double centre_min = 0.0;       // min density on [0.25, 0.75] (unit interval only)
  double left_max = 0.0;         // max density on (0, 0.25]
  double right_max = 0.0;        // max density on [0.75, 1)
  bool finite_fourth_moment = true;
  double excess_kurtosis = 0.0;  // NaN when the fourth moment is infinite
  bool decreasing_after_mode = true;
};

ShapeSummary summarize_shape(Family f, double location, double phi);

// Archetype predicates:
//   symmetric:  one interior mode, asymmetry <= 0.15, |mean - 1/2| <= 0.02
//   asymmetric: one interior mode, |mean - 1/2| >= 0.1
//   bathtub:    density on both outer quarters reaches at least twice the centre minimum
//   ramp:       mode <= 0.4 * median and the density decreases beyond the mode
//   heavy_tail: infinite fourth moment or excess kurtosis >= 4
//   thin_tail:  finite excess kurtosis < 4 and mode >= 0.6 * median
bool satisfies_archetype(ShapeKind kind, const ShapeSummary& s);

}  // namespace glmsim
