#pragma once

#include <span>
#include <vector>

namespace glmsim {

struct DiagnosticValue {
  double value = 0.0;       // +inf when degenerate
  bool degenerate = false;  // constant or duplicated chains
};

// Rank-normalized split-R-hat: the larger of the bulk and folded (tail) versions.
// Requires at least 2 chains with at least 4 draws each (std::invalid_argument otherwise).
DiagnosticValue split_rhat(std::span<const std::vector<double>> chains);

// Bulk effective sample size: rank-normalized split chains, autocorrelations summed
// with Geyer's initial monotone sequence truncation.
DiagnosticValue ess_bulk(std::span<const std::vector<double>> chains);

// ESS of the raw (not rank-normalized, not split) chains.
double ess_basic(std::span<const std::vector<double>> chains);

// Quantile with linear interpolation between order statistics (R type 7).
double quantile_type7(std::vector<double> values, double p);

}  // namespace glmsim
