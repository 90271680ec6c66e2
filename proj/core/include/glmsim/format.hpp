#pragma once

#include <string>
#include <string_view>

namespace glmsim {

// Shortest round-trip is not required; 17 significant digits keeps text output
// reproducible and lossless.
std::string format_double(double v);

// Parses a decimal value; "NA", "nan", "inf" and "-inf" are accepted.
double parse_double(std::string_view s);

}  // namespace glmsim
