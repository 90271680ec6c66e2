#include <benchmark/benchmark.h>

#include "glmsim/dgp.hpp"
#include "glmsim/fit.hpp"
#include "glmsim/rng.hpp"

using namespace glmsim;

static void BM_LogDensity(benchmark::State& state) {
  const auto family = static_cast<Family>(state.range(0));
  const double y = family_support(family) == Support::unit_interval ? 0.3 : 1.7;
  const double mu = family_support(family) == Support::unit_interval ? 0.4 : 1.2;
  const double phi = family == Family::frechet ? 3.0 : 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(log_density(family, y, mu, phi));
  state.SetLabel(std::string(to_string(family)));
}
BENCHMARK(BM_LogDensity)->DenseRange(0, static_cast<int>(kAllFamilies.size()) - 1);

static void BM_Generate(benchmark::State& state) {
  const auto cfg = make_dgp_config(Family::beta, ShapeKind::symmetric, Link::logit, Effect::positive);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg, seed++));
}
BENCHMARK(BM_Generate);

// Wald fits on a fixed dataset; slow families show up here first.
static void BM_FitMle(benchmark::State& state) {
  const auto dgp_family = state.range(0) == 0 ? Family::beta : Family::gamma;
  const auto shape = dgp_family == Family::beta ? ShapeKind::symmetric : ShapeKind::thin_tail;
  const auto link = dgp_family == Family::beta ? Link::logit : Link::log;
  const auto data = generate(make_dgp_config(dgp_family, shape, link, Effect::zero), 7);
  const ModelSpec spec{static_cast<Family>(state.range(1)), link, Formula::ideal};
  for (auto _ : state) benchmark::DoNotOptimize(fit_mle(spec, data));
  state.SetLabel(describe(spec));
}
BENCHMARK(BM_FitMle)
    ->Args({0, static_cast<int>(Family::beta)})
    ->Args({0, static_cast<int>(Family::simplex)})
    ->Args({1, static_cast<int>(Family::gamma)})
    ->Args({1, static_cast<int>(Family::frechet)})
    ->Args({1, static_cast<int>(Family::gompertz)})
    ->Unit(benchmark::kMillisecond);

static void BM_FitMcmc(benchmark::State& state) {
  const auto data =
      generate(make_dgp_config(Family::beta, ShapeKind::symmetric, Link::logit, Effect::zero), 7);
  const ModelSpec spec{Family::beta, Link::logit, Formula::ideal};
  for (auto _ : state) benchmark::DoNotOptimize(fit_mcmc(spec, data));
}
BENCHMARK(BM_FitMcmc)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
