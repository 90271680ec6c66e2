#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "glmsim/distributions.hpp"
#include "glmsim/error.hpp"
#include "glmsim/shapes.hpp"

using namespace glmsim;
namespace bm = boost::math;

namespace {

std::vector<std::pair<double, double>> settings(Family f) {
  std::vector<std::pair<double, double>> out;
  if (f == Family::normal) return {{0.0, 1.0}, {2.5, 0.3}, {-1.0, 4.0}};
  const auto& kinds = family_support(f) == Support::unit_interval
                          ? std::vector<ShapeKind>(kUnitShapes.begin(), kUnitShapes.end())
                          : std::vector<ShapeKind>(kPositiveShapes.begin(), kPositiveShapes.end());
  for (ShapeKind k : kinds) {
    const auto p = shape_presets(f, k);
    out.emplace_back(p.location, p.phi);
  }
  return out;
}

double density(Family f, double y, double mu, double phi) {
  const double lp = detail::log_density_unchecked(f, y, mu, phi);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

double total_mass(Family f, double mu, double phi) {
  auto pdf = [&](double y) { return density(f, y, mu, phi); };
  switch (family_support(f)) {
    case Support::unit_interval:
      return bm::quadrature::tanh_sinh<double>().integrate(pdf, 0.0, 1.0);
    case Support::positive:
      return bm::quadrature::exp_sinh<double>().integrate(pdf, 0.0,
                                                          std::numeric_limits<double>::infinity());
    case Support::real:
      return bm::quadrature::gauss_kronrod<double, 61>::integrate(
          pdf, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  }
  return NAN;
}

// One-sample KS distance between draws and the CDF accumulated by quadrature
// between consecutive sorted draws.
double ks_distance(Family f, double mu, double phi, std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  auto pdf = [&](double y) { return density(f, y, mu, phi); };
  double cdf = 0.0;
  if (family_support(f) == Support::real) {
    cdf = bm::cdf(bm::normal_distribution<>(mu, phi), draws.front());
  } else {
    cdf = bm::quadrature::tanh_sinh<double>().integrate(pdf, 0.0, draws.front());
  }
  const double n = static_cast<double>(draws.size());
  double d = std::max(cdf, 0.0);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (i > 0 && draws[i] > draws[i - 1]) {
      cdf += bm::quadrature::gauss_kronrod<double, 15>::integrate(pdf, draws[i - 1], draws[i]);
    }
    d = std::max({d, std::abs((i + 1) / n - cdf), std::abs(i / n - cdf)});
  }
  return d;
}

}  // namespace

TEST_CASE("log density reference values") {
  CHECK(log_density(Family::beta, 0.3, 0.5, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(log_density(Family::gamma, 1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  for (double mu : {0.2, 0.5, 0.9}) {
    const double phi = 1.3;
    const double expect = -0.5 * std::log(2 * std::numbers::pi * phi * phi * std::pow(mu * (1 - mu), 3));
    CHECK(log_density(Family::simplex, mu, mu, phi) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("densities agree with independent closed forms") {
  const double y = 0.37, mu = 0.61, phi = 2.7;
  CHECK(log_density(Family::beta, y, mu, phi) ==
        doctest::Approx(std::log(bm::pdf(bm::beta_distribution<>(mu * phi, (1 - mu) * phi), y))).epsilon(1e-10));
  {
    const double a = phi, b = std::log(0.5) / std::log(1 - std::pow(mu, a));
    const double expect = std::log(a * b * std::pow(y, a - 1) * std::pow(1 - std::pow(y, a), b - 1));
    CHECK(log_density(Family::kumaraswamy, y, mu, phi) == doctest::Approx(expect).epsilon(1e-10));
  }
  {
    const double d = (y - mu) * (y - mu) / (y * (1 - y) * mu * mu * (1 - mu) * (1 - mu));
    const double expect = -0.5 * std::log(2 * std::numbers::pi * phi * phi * std::pow(y * (1 - y), 3)) - d / (2 * phi * phi);
    CHECK(log_density(Family::simplex, y, mu, phi) == doctest::Approx(expect).epsilon(1e-10));
  }
  const double yp = 1.7, mp = 1.2;
  CHECK(log_density(Family::gamma, yp, mp, phi) ==
        doctest::Approx(std::log(bm::pdf(bm::gamma_distribution<>(phi, mp / phi), yp))).epsilon(1e-10));
  CHECK(log_density(Family::weibull, yp, mp, phi) ==
        doctest::Approx(std::log(bm::pdf(bm::weibull_distribution<>(phi, mp / std::tgamma(1 + 1 / phi)), yp))).epsilon(1e-10));
  {
    const double s = mp / std::tgamma(1 - 1 / phi);
    const double z = yp / s;
    const double expect = std::log(phi / s) - (1 + phi) * std::log(z) - std::pow(z, -phi);
    CHECK(log_density(Family::frechet, yp, mp, phi) == doctest::Approx(expect).epsilon(1e-10));
  }
  {
    const double a = mp * (phi + 1), b = phi + 2;
    const double expect = (a - 1) * std::log(yp) - (a + b) * std::log1p(yp) - std::log(bm::beta(a, b));
    CHECK(log_density(Family::beta_prime, yp, mp, phi) == doctest::Approx(expect).epsilon(1e-10));
  }
  {
    // Gompertz with median mp: differentiate the CDF numerically.
    const double b = std::log1p(std::log(2.0) / phi) / mp;
    auto F = [&](double t) { return 1 - std::exp(-phi * std::expm1(b * t)); };
    CHECK(F(mp) == doctest::Approx(0.5).epsilon(1e-12));
    const double h = 1e-6;
    const double fd = (F(yp + h) - F(yp - h)) / (2 * h);
    CHECK(std::exp(log_density(Family::gompertz, yp, mp, phi)) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(log_density(Family::log_normal, yp, mp, 0.4) ==
        doctest::Approx(std::log(bm::pdf(bm::lognormal_distribution<>(std::log(mp), 0.4), yp))).epsilon(1e-10));
  CHECK(log_density(Family::normal, -0.3, 0.2, 1.5) ==
        doctest::Approx(std::log(bm::pdf(bm::normal_distribution<>(0.2, 1.5), -0.3))).epsilon(1e-10));
}

TEST_CASE("transformed normals equal the normal density of the transformed response") {
  struct Case {
    Family family;
    Link link;
    double (*dT)(double);
  };
  const Case cases[] = {
      {Family::logit_normal, Link::logit, [](double y) { return 1 / (y * (1 - y)); }},
      {Family::cauchit_normal, Link::cauchit,
       [](double y) { const double c = std::cos(std::numbers::pi * (y - 0.5)); return std::numbers::pi / (c * c); }},
      {Family::cloglog_normal, Link::cloglog, [](double y) { return 1 / ((1 - y) * -std::log1p(-y)); }},
      {Family::log_normal, Link::log, [](double y) { return 1 / y; }},
      {Family::softplus_normal, Link::softplus, [](double y) { return 1 / -std::expm1(-y); }},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.family));
    REQUIRE(response_transform(c.family) == c.link);
    const bool unit = family_support(c.family) == Support::unit_interval;
    for (double y : unit ? std::vector<double>{0.01, 0.2, 0.5, 0.77, 0.99} : std::vector<double>{0.05, 0.5, 1.0, 3.0, 12.0}) {
      for (double mu : unit ? std::vector<double>{0.1, 0.5, 0.8} : std::vector<double>{0.3, 1.0, 4.0}) {
        const double sigma = 0.7;
        const double z = apply_link(c.link, y), m = apply_link(c.link, mu);
        const double expect = std::log(bm::pdf(bm::normal_distribution<>(m, sigma), z)) + std::log(c.dT(y));
        CHECK(std::abs(log_density(c.family, y, mu, sigma) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST_CASE("every density integrates to one") {
  for (Family f : kAllFamilies) {
    for (const auto& [mu, phi] : settings(f)) {
      CAPTURE(to_string(f));
      CAPTURE(mu);
      CAPTURE(phi);
      CHECK(total_mass(f, mu, phi) == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("sampler agrees with the density (KS, alpha = 0.01)") {
  const double critical = 1.628 / std::sqrt(10000.0);
  std::uint64_t seed = 11;
  for (Family f : kAllFamilies) {
    for (const auto& [mu, phi] : settings(f)) {
      CAPTURE(to_string(f));
      CAPTURE(mu);
      CAPTURE(phi);
      Rng rng(seed++);
      std::vector<double> draws(10000);
      for (auto& d : draws) d = sample(f, mu, phi, rng);
      CHECK(ks_distance(f, mu, phi, draws) < critical);
    }
  }
}

TEST_CASE("location semantics: mean or median equals mu") {
  struct Case {
    Family f;
    double mu, phi;
  };
  const Case cases[] = {{Family::beta, 0.3, 5},          {Family::kumaraswamy, 0.3, 2},
                        {Family::simplex, 0.3, 1},       {Family::logit_normal, 0.3, 0.8},
                        {Family::cauchit_normal, 0.3, 0.5}, {Family::cloglog_normal, 0.3, 0.6},
                        {Family::gamma, 2.0, 3},         {Family::weibull, 2.0, 2},
                        {Family::frechet, 2.0, 6},       {Family::beta_prime, 2.0, 8},
                        {Family::gompertz, 2.0, 1.5},    {Family::log_normal, 2.0, 0.5},
                        {Family::softplus_normal, 2.0, 0.7}, {Family::normal, -1.0, 2}};
  const int n = 100000;
  Rng rng(2024);
  for (const auto& c : cases) {
    CAPTURE(to_string(c.f));
    std::vector<double> d(n);
    for (auto& v : d) v = sample(c.f, c.mu, c.phi, rng);
    if (location_kind(c.f) == LocationKind::mean) {
      double m = 0, s2 = 0;
      for (double v : d) m += v;
      m /= n;
      for (double v : d) s2 += (v - m) * (v - m);
      const double se = std::sqrt(s2 / (n - 1) / n);
      CHECK(std::abs(m - c.mu) < 4 * se);
    } else {
      std::nth_element(d.begin(), d.begin() + n / 2, d.end());
      const double med = d[n / 2];
      const double se = std::sqrt(0.25 / n) / density(c.f, c.mu, c.mu, c.phi);
      CHECK(std::abs(med - c.mu) < 4 * se);
    }
  }
}

TEST_CASE("sampler reference examples") {
  Rng rng(5);
  std::vector<double> d(10000);
  for (auto& v : d) v = sample(Family::logit_normal, 0.3, 0.05, rng);
  std::nth_element(d.begin(), d.begin() + 5000, d.end());
  CHECK(std::abs(d[5000] - 0.3) <= 0.01);

  double m = 0;
  for (int i = 0; i < 10000; ++i) m += sample(Family::kumaraswamy, 0.5, 1.0, rng);
  CHECK(std::abs(m / 10000 - 0.5) <= 0.02);

  m = 0;
  for (int i = 0; i < 10000; ++i) m += sample(Family::gamma, 3.0, 2.0, rng);
  CHECK(std::abs(m / 10000 - 3.0) <= 3 * 3.0 / std::sqrt(2.0 * 10000));
}

TEST_CASE("draws stay strictly inside the support") {
  Rng rng(9);
  for (int i = 0; i < 20000; ++i) {
    const double a = sample(Family::beta, 0.5, 0.3, rng);
    CHECK((a > 0 && a < 1));
    const double b = sample(Family::cloglog_normal, 0.999, 3.0, rng);
    CHECK((b > 0 && b < 1));
    CHECK(sample(Family::gamma, 0.01, 0.2, rng) > 0);
  }
}

TEST_CASE("location_of") {
  CHECK(location_of(Family::normal, 2.5, Link::identity) == 2.5);
  CHECK(location_of(Family::logit_normal, 0.0, Link::logit) == 0.5);
  CHECK(location_of(Family::beta, 0.0, Link::cloglog) == doctest::Approx(0.632121).epsilon(1e-6));
  CHECK(location_of(Family::normal, 0.0, Link::log) == 1.0);
  CHECK_THROWS_AS(location_of(Family::beta, 0.0, Link::log), ConfigError);
  CHECK_THROWS_AS(location_of(Family::gamma, 0.0, Link::identity), ConfigError);
  CHECK_THROWS_AS(location_of(Family::beta, NAN, Link::logit), InputError);
}

TEST_CASE("support and parameter errors") {
  CHECK_THROWS_AS(log_density(Family::beta, 0.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(log_density(Family::beta, 1.2, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(log_density(Family::gamma, -1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(log_density(Family::gamma, 1.0, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(log_density(Family::frechet, 1.0, 1.0, 1.0), DomainError);
  CHECK_FALSE(valid_shape(Family::frechet, 1.0));
  CHECK(valid_shape(Family::frechet, 1.01));
  CHECK_FALSE(valid_shape(Family::beta, 0.0));
  CHECK(stability(Family::frechet) == Stability::fragile);
  CHECK(stability(Family::gompertz) == Stability::fragile);
  CHECK(stability(Family::beta) == Stability::stable);
}

TEST_CASE("family metadata") {
  int unit = 0, positive = 0;
  for (Family f : kAllFamilies) {
    CHECK(parse_family(to_string(f)) == f);
    unit += family_support(f) == Support::unit_interval;
    positive += family_support(f) == Support::positive;
  }
  CHECK(unit == 6);
  CHECK(positive == 7);
  CHECK(family_support(Family::normal) == Support::real);
  CHECK(location_kind(Family::kumaraswamy) == LocationKind::median);
  CHECK(location_kind(Family::gompertz) == LocationKind::median);
  CHECK(location_kind(Family::beta_prime) == LocationKind::mean);
  CHECK(compatible(Family::normal, Link::cloglog));
  CHECK_FALSE(compatible(Family::gamma, Link::logit));
}

TEST_CASE("extreme shapes do not throw from the unchecked density") {
  for (Family f : {Family::beta, Family::gamma, Family::simplex, Family::kumaraswamy}) {
    const double y = family_support(f) == Support::unit_interval ? 0.5 : 1.5;
    for (double phi : {1e-300, 1e300, 1.7e308}) {
      const double v = detail::log_density_unchecked(f, y, 0.5, phi);
      CHECK_FALSE(v > 1e300);
    }
  }
}
