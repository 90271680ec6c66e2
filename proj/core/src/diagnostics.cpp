#include "glmsim/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace glmsim {

namespace {

using Chains = std::vector<std::vector<double>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw std::invalid_argument("diagnostics need at least 2 chains");
  const auto n = chains.front().size();
  if (n < 4) throw std::invalid_argument("diagnostics need at least 4 draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw std::invalid_argument("chains must have equal length");
  }
}

bool is_degenerate(std::span<const std::vector<double>> chains) {
  for (const auto& c : chains) {
    if (std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); })) return true;
    if (!std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); })) return true;
  }
  for (std::size_t a = 0; a < chains.size(); ++a) {
    for (std::size_t b = a + 1; b < chains.size(); ++b) {
      if (chains[a] == chains[b]) return true;
    }
  }
  return false;
}

Chains split(std::span<const std::vector<double>> chains) {
  Chains out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    // Odd lengths drop the middle draw.
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

// Normal scores of pooled average ranks, (r - 3/8) / (S + 1/4).
Chains rank_normalize(const Chains& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) {
      pooled.emplace_back(chains[c][i], c * chains[c].size() + i);
    }
  }
  const std::size_t S = pooled.size();
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> rank(S);
  for (std::size_t i = 0; i < S;) {
    std::size_t j = i;
    while (j + 1 < S && pooled[j + 1].first == pooled[i].first) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[pooled[k].second] = avg;
    i = j + 1;
  }
  const boost::math::normal_distribution<double> std_normal;
  Chains out = chains;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) {
      const double r = rank[c * chains[c].size() + i];
      out[c][i] = boost::math::quantile(std_normal, (r - 0.375) / (static_cast<double>(S) + 0.25));
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double rhat_basic(const Chains& chains) {
  const auto m = static_cast<double>(chains.size());
  const auto n = static_cast<double>(chains.front().size());
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    means.push_back(mean(c));
    vars.push_back(sample_var(c));
  }
  const double W = mean(vars);
  const double B = n * sample_var(means);
  (void)m;
  const double var_plus = (n - 1.0) / n * W + B / n;
  return std::sqrt(var_plus / W);
}

// Biased autocovariance of one chain at lag t.
double autocov(const std::vector<double>& c, double m, std::size_t t) {
  double s = 0.0;
  for (std::size_t i = 0; i + t < c.size(); ++i) s += (c[i] - m) * (c[i + t] - m);
  return s / static_cast<double>(c.size());
}

double ess_of(const Chains& chains) {
  const std::size_t M = chains.size();
  const std::size_t N = chains.front().size();
  std::vector<double> means(M), vars(M);
  for (std::size_t c = 0; c < M; ++c) {
    means[c] = mean(chains[c]);
    vars[c] = autocov(chains[c], means[c], 0) * static_cast<double>(N) / static_cast<double>(N - 1);
  }
  const double mean_var = mean(vars);
  double var_plus = mean_var * static_cast<double>(N - 1) / static_cast<double>(N);
  if (M > 1) var_plus += sample_var(means);

  auto mean_acov = [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t c = 0; c < M; ++c) s += autocov(chains[c], means[c], t);
    return s / static_cast<double>(M);
  };
  auto rho = [&](std::size_t t) { return 1.0 - (mean_var - mean_acov(t)) / var_plus; };

  const auto n = static_cast<long>(N);
  std::vector<double> rho_hat(N + 1, 0.0);
  rho_hat[0] = 1.0;
  double rho_even = 1.0;
  double rho_odd = rho(1);
  rho_hat[1] = rho_odd;
  long t = 0;
  while (t < n - 5 && rho_even + rho_odd > 0.0) {
    t += 2;
    rho_even = rho(static_cast<std::size_t>(t));
    rho_odd = rho(static_cast<std::size_t>(t + 1));
    if (rho_even + rho_odd >= 0.0) {
      rho_hat[t] = rho_even;
      rho_hat[t + 1] = rho_odd;
    }
  }
  const long max_t = t;
  if (rho_even > 0.0) rho_hat[max_t] = rho_even;
  // Initial monotone sequence.
  for (t = 0; t <= max_t - 4;) {
    t += 2;
    if (rho_hat[t] + rho_hat[t + 1] > rho_hat[t - 2] + rho_hat[t - 1]) {
      rho_hat[t] = 0.5 * (rho_hat[t - 2] + rho_hat[t - 1]);
      rho_hat[t + 1] = rho_hat[t];
    }
  }
  const double S = static_cast<double>(M * N);
  double tau = -1.0 + rho_hat[max_t];
  for (long k = 0; k < max_t; ++k) tau += 2.0 * rho_hat[k];
  tau = std::max(tau, 1.0 / std::log10(S));
  return S / tau;
}

}  // namespace

DiagnosticValue split_rhat(std::span<const std::vector<double>> chains) {
  check_shape(chains);
  if (is_degenerate(chains)) return {kInf, true};
  const Chains halves = split(chains);
  const double bulk = rhat_basic(rank_normalize(halves));
  std::vector<double> pooled;
  for (const auto& c : halves) pooled.insert(pooled.end(), c.begin(), c.end());
  const double med = quantile_type7(pooled, 0.5);
  Chains folded = halves;
  for (auto& c : folded) {
    for (double& v : c) v = std::abs(v - med);
  }
  const double tail = rhat_basic(rank_normalize(folded));
  return {std::max(bulk, tail), false};
}

DiagnosticValue ess_bulk(std::span<const std::vector<double>> chains) {
  check_shape(chains);
  if (is_degenerate(chains)) return {kInf, true};
  return {ess_of(rank_normalize(split(chains))), false};
}

double ess_basic(std::span<const std::vector<double>> chains) {
  check_shape(chains);
  return ess_of(Chains(chains.begin(), chains.end()));
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace glmsim
